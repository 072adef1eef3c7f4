//! Plain-text raster and point dumps.

use std::fs::File;
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use super::ScalarField;

/// Writes an ASCII 16-bit PGM (`P2`), top row is `y_max`.
///
/// Values are mapped linearly from `[lo, hi]` to `[0, 65535]` and clamped.
pub fn write_pgm(field: &ScalarField, lo: f64, hi: f64, path: &Path) -> io::Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    write_pgm_to(field, lo, hi, &mut w)?;
    w.flush()
}

pub fn write_pgm_to(field: &ScalarField, lo: f64, hi: f64, w: &mut impl Write) -> io::Result<()> {
    let n = field.grid().n();
    writeln!(w, "P2\n{n} {n}\n65535")?;
    let span = if hi > lo { hi - lo } else { 1.0 };
    for j in (0..n).rev() {
        let mut line = String::with_capacity(6 * n);
        for i in 0..n {
            let t = ((field.get(i, j) - lo) / span).clamp(0.0, 1.0);
            let q = (t * 65535.0).round() as u32;
            if i > 0 {
                line.push(' ');
            }
            line.push_str(&q.to_string());
        }
        writeln!(w, "{line}")?;
    }
    Ok(())
}

/// Writes `x,y,value` rows for every grid point.
pub fn write_field_csv(field: &ScalarField, path: &Path) -> io::Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    writeln!(w, "x,y,value")?;
    let g = field.grid();
    for j in 0..g.n() {
        for i in 0..g.n() {
            writeln!(w, "{},{},{}", g.x(i), g.y(j), field.get(i, j))?;
        }
    }
    w.flush()
}

/// Writes `x,y` rows.
pub fn write_points_csv(points: &[[f64; 2]], path: &Path) -> io::Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    writeln!(w, "x,y")?;
    for p in points {
        writeln!(w, "{},{}", p[0], p[1])?;
    }
    w.flush()
}

/// Reads `x,y` rows; blank lines, `#` comments and a non-numeric header are skipped.
pub fn read_points_csv(path: &Path) -> io::Result<Vec<[f64; 2]>> {
    parse_points(BufReader::new(File::open(path)?))
}

pub fn parse_points(r: impl BufRead) -> io::Result<Vec<[f64; 2]>> {
    let mut out = Vec::new();
    let mut header_allowed = true;
    for (k, line) in r.lines().enumerate() {
        let line = line?;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut parts = line.split(',').map(str::trim);
        let (a, b) = (parts.next(), parts.next());
        match (a.and_then(|s| s.parse::<f64>().ok()), b.and_then(|s| s.parse::<f64>().ok())) {
            (Some(x), Some(y)) => out.push([x, y]),
            _ if header_allowed => {}
            _ => return Err(io::Error::new(io::ErrorKind::InvalidData, format!("line {}: expected x,y", k + 1))),
        }
        header_allowed = false;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Grid;

    #[test]
    fn pgm_layout() {
        let g = Grid::standard(16).unwrap();
        let f = ScalarField::from_fn(g, |_, y| if y > 0.0 { 1.0 } else { 0.0 });
        let mut buf = Vec::new();
        write_pgm_to(&f, 0.0, 1.0, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("P2"));
        assert_eq!(lines.next(), Some("16 16"));
        assert_eq!(lines.next(), Some("65535"));
        assert!(lines.next().unwrap().starts_with("65535 65535"));
        assert!(text.lines().last().unwrap().starts_with("0 0"));
    }

    #[test]
    fn points_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("pts.csv");
        let pts = vec![[0.5, -1.25], [3.0, 4.0]];
        write_points_csv(&pts, &p).unwrap();
        assert_eq!(read_points_csv(&p).unwrap(), pts);
        assert!(parse_points("x,y\n1,2\nbad\n".as_bytes()).is_err());
    }
}
