//! Resolving sequence arguments: catalog names or `@file.json`.

use std::fs;

use serde_json::Value;
use togglekit::catalog;
use togglekit::ddsim::DDSequence;
use togglekit::seqmodel::{ElementDoc, SequenceDoc};
use togglekit::RotationSequence;

use crate::CliError;

fn read(path: &str) -> Result<Value, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::Io(format!("{path}: {e}")))?;
    serde_json::from_str(&text).map_err(|e| CliError::Input(format!("{path}: malformed JSON: {e}")))
}

fn to_radians(doc: &mut SequenceDoc) {
    for el in &mut doc.elements {
        match el {
            ElementDoc::Phase { beta, phase, latitude } => {
                *beta = beta.to_radians();
                *phase = phase.to_radians();
                if let Some(l) = latitude {
                    *l = l.to_radians();
                }
            }
            ElementDoc::Axis { beta, .. } => *beta = beta.to_radians(),
        }
    }
}

fn sequence_from_value(value: Value, path: &str, deg: bool) -> Result<RotationSequence, CliError> {
    let mut doc: SequenceDoc = serde_json::from_value(value)
        .map_err(|e| CliError::Input(format!("{path}: not a sequence document: {e}")))?;
    if deg {
        to_radians(&mut doc);
    }
    RotationSequence::try_from(doc).map_err(|e| CliError::Input(format!("{path}: {e}")))
}

pub fn sequence(arg: &str, deg: bool) -> Result<RotationSequence, CliError> {
    match arg.strip_prefix('@') {
        Some(path) => sequence_from_value(read(path)?, path, deg),
        None => catalog::named(arg).map_err(CliError::from),
    }
}

/// A decoupling cycle. Files may carry a `delays` array next to the
/// sequence fields; without it pulses are equally spaced.
pub fn dd_sequence(arg: &str, deg: bool) -> Result<DDSequence, CliError> {
    let Some(path) = arg.strip_prefix('@') else {
        return catalog::named_dd(arg).map_err(CliError::from);
    };
    let mut value = read(path)?;
    let delays = value.as_object_mut().and_then(|o| o.remove("delays"));
    let pulses = sequence_from_value(value, path, deg)?;
    match delays {
        None => Ok(DDSequence::equally_spaced(pulses)),
        Some(d) => {
            let delays: Vec<f64> = serde_json::from_value(d)
                .map_err(|e| CliError::Input(format!("{path}: delays: {e}")))?;
            DDSequence::new(pulses, delays).map_err(CliError::from)
        }
    }
}
