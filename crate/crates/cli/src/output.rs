//! Serialization helpers: JSON with fixed 17-digit floats, CSV and plain text.

use std::io::{self, Write};

use anyhow::Result;
use num_complex::Complex64 as C;
use qgalois::Mat3;
use serde::Serialize;

/// Writes every float as `d.dddddddddddddddde±x`, which round-trips `f64` exactly.
/// Non-finite values become `null`.
#[derive(Clone, Debug, Default)]
pub struct FixedDigits {
    indent: usize,
    has_value: bool,
}

fn write_float<W: ?Sized + Write>(w: &mut W, x: f64) -> io::Result<()> {
    if x.is_finite() {
        write!(w, "{}", sig17(x))
    } else {
        w.write_all(b"null")
    }
}

/// `x` with 17 significant digits in exponent form.
pub fn sig17(x: f64) -> String {
    format!("{x:.16e}")
}

impl serde_json::ser::Formatter for FixedDigits {
    fn write_f64<W: ?Sized + Write>(&mut self, w: &mut W, x: f64) -> io::Result<()> {
        write_float(w, x)
    }

    fn write_f32<W: ?Sized + Write>(&mut self, w: &mut W, x: f32) -> io::Result<()> {
        write_float(w, x as f64)
    }

    fn begin_array<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.indent += 1;
        self.has_value = false;
        w.write_all(b"[")
    }

    fn end_array<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.indent -= 1;
        if self.has_value {
            self.newline(w)?;
        }
        w.write_all(b"]")
    }

    fn begin_array_value<W: ?Sized + Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        if !first {
            w.write_all(b",")?;
        }
        self.newline(w)
    }

    fn end_array_value<W: ?Sized + Write>(&mut self, _w: &mut W) -> io::Result<()> {
        self.has_value = true;
        Ok(())
    }

    fn begin_object<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.indent += 1;
        self.has_value = false;
        w.write_all(b"{")
    }

    fn end_object<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.indent -= 1;
        if self.has_value {
            self.newline(w)?;
        }
        w.write_all(b"}")
    }

    fn begin_object_key<W: ?Sized + Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        if !first {
            w.write_all(b",")?;
        }
        self.newline(w)
    }

    fn begin_object_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        w.write_all(b": ")
    }

    fn end_object_value<W: ?Sized + Write>(&mut self, _w: &mut W) -> io::Result<()> {
        self.has_value = true;
        Ok(())
    }
}

impl FixedDigits {
    fn newline<W: ?Sized + Write>(&self, w: &mut W) -> io::Result<()> {
        w.write_all(b"\n")?;
        for _ in 0..self.indent {
            w.write_all(b"  ")?;
        }
        Ok(())
    }
}

pub fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, FixedDigits::default());
    value.serialize(&mut ser)?;
    buf.push(b'\n');
    Ok(String::from_utf8(buf)?)
}

pub fn complex(c: C) -> String {
    format!("{}{}{}i", sig17(c.re), if c.im < 0.0 || c.im.is_sign_negative() { "-" } else { "+" }, sig17(c.im.abs()))
}

pub fn opt(x: Option<f64>) -> String {
    x.map(sig17).unwrap_or_default()
}

pub fn matrix_rows(m: &Mat3<f64>) -> String {
    let row = |i: usize| m.m[i].iter().map(|c| complex(*c)).collect::<Vec<_>>().join("  ");
    (0..3).map(|i| format!("    [{}]", row(i))).collect::<Vec<_>>().join("\n")
}

pub fn csv_string(header: &[&str], rows: &[Vec<String>]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header)?;
    for r in rows {
        w.write_record(r)?;
    }
    Ok(String::from_utf8(w.into_inner()?)?)
}
