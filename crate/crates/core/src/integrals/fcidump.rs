use std::fmt::Write as _;
use std::path::Path;

use super::hamiltonian::MolecularIntegrals;
use crate::error::{Error, Result};

const DUPLICATE_TOL: f64 = 1e-10;

struct Header {
    norb: usize,
    nelec: usize,
    ms2: i64,
}

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

fn parse_header(lines: &[(usize, &str)]) -> Result<(Header, usize)> {
    let mut norb = None;
    let mut nelec = None;
    let mut ms2 = 0i64;
    let Some(&(first_no, first)) = lines.first() else {
        return Err(parse_err(1, "empty input"));
    };
    if !first.trim_start().to_ascii_uppercase().starts_with("&FCI") {
        return Err(parse_err(first_no, "expected '&FCI' header"));
    }
    for (idx, &(line_no, raw)) in lines.iter().enumerate() {
        let mut text = raw.trim().to_string();
        if idx == 0 {
            text = text[4..].to_string();
        }
        let upper = text.to_ascii_uppercase();
        let end = ["&END", "$END", "/"]
            .iter()
            .filter_map(|m| upper.find(m))
            .min();
        let body = match end {
            Some(pos) => &text[..pos],
            None => &text[..],
        };
        for piece in body.split(',') {
            let piece = piece.trim();
            let Some((key, value)) = piece.split_once('=') else {
                continue;
            };
            let key = key.trim().to_ascii_uppercase();
            let value = value.trim();
            let int = |v: &str| {
                v.parse::<i64>()
                    .map_err(|_| parse_err(line_no, format!("malformed value for {key}: '{v}'")))
            };
            match key.as_str() {
                "NORB" => {
                    let v = int(value)?;
                    if v <= 0 {
                        return Err(parse_err(line_no, "NORB must be positive"));
                    }
                    norb = Some(v as usize);
                }
                "NELEC" => {
                    let v = int(value)?;
                    if v < 0 {
                        return Err(parse_err(line_no, "NELEC must be non-negative"));
                    }
                    nelec = Some(v as usize);
                }
                "MS2" => ms2 = int(value)?,
                _ => {}
            }
        }
        if end.is_some() {
            let norb = norb.ok_or_else(|| parse_err(line_no, "header lacks NORB"))?;
            let nelec = nelec.ok_or_else(|| parse_err(line_no, "header lacks NELEC"))?;
            return Ok((Header { norb, nelec, ms2 }, idx + 1));
        }
    }
    let last = lines.last().map(|l| l.0).unwrap_or(1);
    Err(parse_err(last, "unterminated header (missing &END)"))
}

fn assign(slot: &mut Option<f64>, value: f64, indices: [usize; 4]) -> Result<()> {
    match *slot {
        Some(old) if (old - value).abs() > DUPLICATE_TOL => Err(Error::Consistency {
            indices,
            first: old,
            second: value,
        }),
        _ => {
            *slot = Some(value);
            Ok(())
        }
    }
}

/// Parses FCIDUMP text (chemist-ordered, 1-indexed integrals).
pub fn parse_fcidump(text: &str) -> Result<MolecularIntegrals> {
    let lines: Vec<(usize, &str)> = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l))
        .filter(|(_, l)| !l.trim().is_empty())
        .collect();
    let (header, body_start) = parse_header(&lines)?;
    let n = header.norb;
    let mut chem: Vec<Option<f64>> = vec![None; n * n * n * n];
    let mut h: Vec<Option<f64>> = vec![None; n * n];
    let mut core: Option<f64> = None;
    let at4 = |p: usize, q: usize, r: usize, s: usize| ((p * n + q) * n + r) * n + s;

    for &(line_no, raw) in &lines[body_start..] {
        let tokens: Vec<&str> = raw.split_whitespace().collect();
        if tokens.len() != 5 {
            return Err(parse_err(
                line_no,
                format!("expected 'value p q r s', found {} fields", tokens.len()),
            ));
        }
        let value: f64 = tokens[0]
            .replace(['D', 'd'], "E")
            .parse()
            .map_err(|_| parse_err(line_no, format!("malformed value '{}'", tokens[0])))?;
        let mut idx = [0usize; 4];
        for (k, tok) in tokens[1..].iter().enumerate() {
            idx[k] = tok
                .parse()
                .map_err(|_| parse_err(line_no, format!("malformed index '{tok}'")))?;
            if idx[k] > n {
                return Err(parse_err(
                    line_no,
                    format!("index {} out of range [1, {n}]", idx[k]),
                ));
            }
        }
        let [i, j, k, l] = idx;
        match (i, j, k, l) {
            (0, 0, 0, 0) => assign(&mut core, value, idx)?,
            (i, j, 0, 0) if i > 0 && j > 0 => {
                assign(&mut h[(i - 1) * n + (j - 1)], value, idx)?;
                assign(&mut h[(j - 1) * n + (i - 1)], value, idx)?;
            }
            // orbital energies
            (i, 0, 0, 0) if i > 0 => {}
            (i, j, k, l) if i > 0 && j > 0 && k > 0 && l > 0 => {
                let (p, q, r, s) = (i - 1, j - 1, k - 1, l - 1);
                for (a, b, c, d) in [
                    (p, q, r, s),
                    (q, p, r, s),
                    (p, q, s, r),
                    (q, p, s, r),
                    (r, s, p, q),
                    (s, r, p, q),
                    (r, s, q, p),
                    (s, r, q, p),
                ] {
                    assign(&mut chem[at4(a, b, c, d)], value, idx)?;
                }
            }
            _ => {
                return Err(parse_err(
                    line_no,
                    format!("unsupported index pattern {i} {j} {k} {l}"),
                ))
            }
        }
    }

    let sz = header.ms2 as f64 / 2.0;
    let h_one: Vec<f64> = h.into_iter().map(|v| v.unwrap_or(0.0)).collect();
    let chem: Vec<f64> = chem.into_iter().map(|v| v.unwrap_or(0.0)).collect();
    MolecularIntegrals::from_chemist(n, header.nelec, sz, core.unwrap_or(0.0), h_one, &chem)
}

pub fn read_fcidump(path: impl AsRef<Path>) -> Result<MolecularIntegrals> {
    let text = std::fs::read_to_string(path.as_ref()).map_err(|e| Error::io(path.as_ref(), e))?;
    parse_fcidump(&text)
}

/// Serializes the symmetry-unique nonzero integrals.
pub fn write_fcidump(ints: &MolecularIntegrals) -> String {
    let n = ints.n_orbitals;
    let mut out = String::new();
    let ms2 = (2.0 * ints.sz).round() as i64;
    let _ = writeln!(out, "&FCI NORB={n},NELEC={},MS2={ms2},", ints.n_electrons);
    let _ = writeln!(out, "  ORBSYM={}", "1,".repeat(n));
    let _ = writeln!(out, "  ISYM=1,");
    let _ = writeln!(out, "&END");
    let pair = |a: usize, b: usize| a * (a + 1) / 2 + b;
    for i in 0..n {
        for j in 0..=i {
            for k in 0..n {
                for l in 0..=k {
                    if pair(i, j) < pair(k, l) {
                        continue;
                    }
                    let v = ints.chem(i, j, k, l);
                    if v != 0.0 {
                        let _ =
                            writeln!(out, "{:>24.16e} {} {} {} {}", v, i + 1, j + 1, k + 1, l + 1);
                    }
                }
            }
        }
    }
    for i in 0..n {
        for j in 0..=i {
            let v = ints.h(i, j);
            if v != 0.0 {
                let _ = writeln!(out, "{:>24.16e} {} {} 0 0", v, i + 1, j + 1);
            }
        }
    }
    let _ = writeln!(out, "{:>24.16e} 0 0 0 0", ints.core_energy);
    out
}
