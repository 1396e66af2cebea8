//! CSV export/import of sample paths: header `t,value`, 17 significant digits.

use std::io::{Read, Write};

use super::{SamplePath, SynthesisMethod};
use crate::error::{Error, Result};
use crate::real::Real;

pub fn write_csv<T: Real, W: Write>(path: &SamplePath<T>, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["t", "value"])?;
    for (t, v) in path.times().zip(&path.values) {
        w.write_record([format!("{:.16e}", t.as_f64()), format!("{:.16e}", v.as_f64())])?;
    }
    w.flush()?;
    Ok(())
}

/// Reads a `t,value` file; `dt` is taken from the first two time stamps
/// (1 for a single row). The result is tagged `Imported` with seed 0.
pub fn read_csv<T: Real, R: Read>(input: R) -> Result<SamplePath<T>> {
    let mut r = csv::Reader::from_reader(input);
    let headers = r.headers()?.clone();
    if headers.len() < 2 || &headers[0] != "t" || &headers[1] != "value" {
        return Err(Error::Io(format!("expected header t,value, got {:?}", headers)));
    }
    let mut ts = Vec::new();
    let mut vs = Vec::new();
    for rec in r.records() {
        let rec = rec?;
        let parse = |s: &str| s.trim().parse::<f64>().map_err(|e| Error::Io(format!("bad number {:?}: {}", s, e)));
        ts.push(parse(&rec[0])?);
        vs.push(T::lit(parse(&rec[1])?));
    }
    let dt = if ts.len() >= 2 { ts[1] - ts[0] } else { 1.0 };
    SamplePath::new(T::lit(dt), vs, 0, SynthesisMethod::Imported)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_is_exact() {
        let p = SamplePath::new(0.1, vec![1.0 / 3.0, -2.5e-300, 7.0, std::f64::consts::PI], 9, SynthesisMethod::Spectral).unwrap();
        let mut buf = Vec::new();
        write_csv(&p, &mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("t,value\n"));
        let back: SamplePath<f64> = read_csv(&buf[..]).unwrap();
        assert_eq!(back.values, p.values);
        assert!((back.dt - 0.1).abs() < 1e-16);
    }
}
