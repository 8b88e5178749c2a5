//! CSV for sample batches and density-evaluation points.
//!
//! Header `Y1,...,Yd` (or `Z1,...,Zd` after the transform), UTF-8, LF line
//! endings, floats in shortest round-trip decimal form, and the literal
//! token `-inf` for off-support coordinates of untransformed points.

use std::io::{BufRead, Write};

use mgp_core::density::MgpPoint;
use mgp_core::simulate::boxcox_transform;

use crate::{format_float, parse_float, CliError, LINE_ENDING};

/// Writes a batch. With `transform` set, coordinates pass through the
/// exponential transform and off-support coordinates become the finite
/// floor `-scale`.
pub fn write_samples<W: Write + ?Sized>(
    out: &mut W,
    d: usize,
    points: &[MgpPoint],
    transform: Option<f64>,
) -> Result<(), CliError> {
    let prefix = if transform.is_some() { "Z" } else { "Y" };
    let header: Vec<String> = (1..=d).map(|j| format!("{prefix}{j}")).collect();
    write!(out, "{}{}", header.join(","), LINE_ENDING)?;
    for p in points {
        let row: Vec<String> = match transform {
            Some(scale) => boxcox_transform(p, scale).iter().map(|&v| format_float(v)).collect(),
            None => p.to_dense().iter().map(|&v| format_float(v)).collect(),
        };
        write!(out, "{}{}", row.join(","), LINE_ENDING)?;
    }
    Ok(())
}

/// Reads points written with the `-inf` convention. The header row is
/// required; its width fixes the dimension.
pub fn read_points<R: BufRead>(input: R) -> Result<Vec<MgpPoint>, CliError> {
    let mut lines = input.lines();
    let header = lines
        .next()
        .ok_or_else(|| CliError::Parse("empty points file".to_string()))??;
    let d = header.split(',').count();
    let mut points = Vec::new();
    for (lineno, line) in lines.enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let coords: Vec<f64> = line
            .split(',')
            .map(parse_float)
            .collect::<Result<_, _>>()?;
        if coords.len() != d {
            return Err(CliError::Parse(format!(
                "row {}: expected {d} columns, found {}",
                lineno + 2,
                coords.len()
            )));
        }
        let p = MgpPoint::from_dense(&coords)
            .map_err(|e| CliError::Parse(format!("row {}: {e}", lineno + 2)))?;
        points.push(p);
    }
    Ok(points)
}

#[cfg(test)]
mod tests {
    use super::*;
    use mgp_core::model::Signature;

    #[test]
    fn roundtrip_preserves_support_and_values() {
        let sig = Signature::new(vec![1, 2], 3).unwrap();
        let p = MgpPoint::new(3, sig, vec![0.123456789012345, -2.5]).unwrap();
        let mut buf = Vec::new();
        write_samples(&mut buf, 3, std::slice::from_ref(&p), None).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("Y1,Y2,Y3\n"));
        assert!(text.contains("-inf,0.123456789012345,-2.5"));
        let read = read_points(&buf[..]).unwrap();
        assert_eq!(read.len(), 1);
        assert_eq!(read[0], p);
    }

    #[test]
    fn transform_writes_finite_floor() {
        let sig = Signature::new(vec![0], 2).unwrap();
        let p = MgpPoint::new(2, sig, vec![0.0]).unwrap();
        let mut buf = Vec::new();
        write_samples(&mut buf, 2, &[p], Some(4.0)).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("Z1,Z2\n"));
        assert!(text.contains("0,-4"));
    }

    #[test]
    fn bad_token_is_a_parse_error() {
        let data = b"Y1,Y2\n1.0,oops\n" as &[u8];
        assert!(matches!(read_points(data), Err(CliError::Parse(_))));
    }
}
