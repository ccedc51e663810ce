//! Field files.
//!
//! CSV: a header line `# dampwave-field v1 K=<K>`, a column line `k,re,im`,
//! then one row per wavenumber in ascending order.
//!
//! Binary: the header line `dampwave-field v1 K=<K>\n` followed by
//! `2K+1` pairs of little-endian `f64` (re, im) for `k = -K..=K`.

use std::io::{BufRead, Read, Write};

use rustfft::num_complex::Complex64;

use super::SpectralField;
use crate::error::{Error, Result};

const MAGIC: &str = "dampwave-field";
const VERSION: &str = "v1";

fn header(k_max: usize) -> String {
    format!("{MAGIC} {VERSION} K={k_max}")
}

fn parse_header(line: &str) -> Result<usize> {
    let mut parts = line.split_whitespace();
    if parts.next() != Some(MAGIC) {
        return Err(Error::Format(format!("not a field file: {line:?}")));
    }
    match parts.next() {
        Some(VERSION) => {}
        Some(v) => return Err(Error::Format(format!("unsupported field format version {v}"))),
        None => return Err(Error::Format("missing format version".into())),
    }
    let k = parts
        .next()
        .and_then(|p| p.strip_prefix("K="))
        .ok_or_else(|| Error::Format("missing K=<band> in header".into()))?;
    k.parse()
        .map_err(|_| Error::Format(format!("bad band {k:?} in header")))
}

pub fn write_csv(field: &SpectralField, mut w: impl Write) -> Result<()> {
    writeln!(w, "# {}", header(field.k_max()))?;
    writeln!(w, "k,re,im")?;
    for (k, c) in field.iter() {
        writeln!(w, "{k},{:e},{:e}", c.re, c.im)?;
    }
    Ok(())
}

pub fn read_csv(r: impl BufRead) -> Result<SpectralField> {
    let mut lines = r.lines();
    let first = lines.next().ok_or_else(|| Error::Format("empty field file".into()))??;
    let k_max = parse_header(first.trim_start_matches('#').trim())?;
    let mut field = SpectralField::zeros(k_max);
    let mut seen = vec![false; field.len()];
    for line in lines {
        let line = line?;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') || line == "k,re,im" {
            continue;
        }
        let cols: Vec<&str> = line.split(',').map(str::trim).collect();
        let [k, re, im] = cols[..] else {
            return Err(Error::Format(format!("expected k,re,im in {line:?}")));
        };
        let bad = |s: &str| Error::Format(format!("bad number {s:?}"));
        let k: i64 = k.parse().map_err(|_| bad(k))?;
        let re: f64 = re.parse().map_err(|_| bad(re))?;
        let im: f64 = im.parse().map_err(|_| bad(im))?;
        if k.unsigned_abs() as usize > k_max {
            return Err(Error::Format(format!("wavenumber {k} outside K = {k_max}")));
        }
        let slot = (k + k_max as i64) as usize;
        if std::mem::replace(&mut seen[slot], true) {
            return Err(Error::Format(format!("wavenumber {k} listed twice")));
        }
        field.set(k, Complex64::new(re, im));
    }
    if let Some(missing) = seen.iter().position(|s| !s) {
        return Err(Error::Format(format!("wavenumber {} missing", missing as i64 - k_max as i64)));
    }
    field.validate()?;
    Ok(field)
}

pub fn write_binary(field: &SpectralField, mut w: impl Write) -> Result<()> {
    writeln!(w, "{}", header(field.k_max()))?;
    for c in field.coeffs() {
        w.write_all(&c.re.to_le_bytes())?;
        w.write_all(&c.im.to_le_bytes())?;
    }
    Ok(())
}

pub fn read_binary(mut r: impl Read) -> Result<SpectralField> {
    let mut line = Vec::new();
    let mut byte = [0u8; 1];
    loop {
        if r.read(&mut byte)? == 0 {
            return Err(Error::Format("truncated header".into()));
        }
        if byte[0] == b'\n' {
            break;
        }
        line.push(byte[0]);
        if line.len() > 128 {
            return Err(Error::Format("header line too long".into()));
        }
    }
    let line = String::from_utf8(line).map_err(|_| Error::Format("header is not UTF-8".into()))?;
    let k_max = parse_header(&line)?;
    let mut coeffs = Vec::with_capacity(2 * k_max + 1);
    let mut buf = [0u8; 8];
    for _ in 0..2 * k_max + 1 {
        r.read_exact(&mut buf)?;
        let re = f64::from_le_bytes(buf);
        r.read_exact(&mut buf)?;
        let im = f64::from_le_bytes(buf);
        coeffs.push(Complex64::new(re, im));
    }
    SpectralField::from_coeffs(k_max, coeffs)
}
