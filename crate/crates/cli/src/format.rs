//! Fixed-width float output: 17 significant digits, `.` separator, `\n` endings.

use std::io;

use serde::Serialize;
use serde_json::ser::Formatter;

pub fn float(x: f64) -> String {
    if x == 0.0 {
        // Avoid printing a signed zero.
        return format!("{:.16e}", 0.0);
    }
    format!("{x:.16e}")
}

pub fn csv_row(values: &[f64]) -> String {
    values.iter().map(|v| float(*v)).collect::<Vec<_>>().join(",")
}

struct Fixed;

impl Formatter for Fixed {
    fn write_f64<W: ?Sized + io::Write>(&mut self, w: &mut W, value: f64) -> io::Result<()> {
        w.write_all(float(value).as_bytes())
    }

    fn write_f32<W: ?Sized + io::Write>(&mut self, w: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(w, value as f64)
    }
}

/// Single-line JSON with every float in fixed format.
pub fn json<T: Serialize>(value: &T) -> String {
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut out, Fixed);
    value.serialize(&mut ser).expect("in-memory serialization");
    String::from_utf8(out).expect("JSON is UTF-8")
}
