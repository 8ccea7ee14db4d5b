//! Plain-text writers for matrices, symbols and samples.

use std::io::{self, Write};

use crate::toeplitz::SymbolCoeffs;
use crate::Matrix;

/// Shortest round-trip text; scientific notation outside `[1e-4, 1e15)`.
pub fn fmt_f64(x: f64) -> String {
    let a = x.abs();
    if x != 0.0 && a.is_finite() && !(1e-4..1e15).contains(&a) {
        format!("{x:e}")
    } else {
        x.to_string()
    }
}

/// Dense row-major CSV preceded by a `# size=<m>` line.
pub fn write_matrix_csv<W: Write>(mut w: W, x: &Matrix) -> io::Result<()> {
    writeln!(w, "# size={}", x.nrows())?;
    for i in 0..x.nrows() {
        let row: Vec<String> = (0..x.ncols()).map(|j| fmt_f64(x[(i, j)])).collect();
        writeln!(w, "{}", row.join(","))?;
    }
    Ok(())
}

/// Half bandwidth: largest `|i - j|` with a nonzero entry.
pub fn bandwidth(x: &Matrix) -> usize {
    let mut b = 0;
    for i in 0..x.nrows() {
        for j in 0..x.ncols() {
            if x[(i, j)] != 0.0 {
                b = b.max(i.abs_diff(j));
            }
        }
    }
    b
}

/// Banded format: a `size bandwidth` line, then one line per diagonal
/// `offset v_0 v_1 ...` for offsets `-b..=b` (offset `d` holds `x[i][i+d]`).
pub fn write_banded<W: Write>(mut w: W, x: &Matrix) -> io::Result<()> {
    let m = x.nrows();
    let b = bandwidth(x);
    writeln!(w, "{m} {b}")?;
    for d in -(b as isize)..=(b as isize) {
        let mut line = d.to_string();
        for i in 0..m as isize {
            let j = i + d;
            if j >= 0 && (j as usize) < x.ncols() {
                line.push(' ');
                line.push_str(&fmt_f64(x[(i as usize, j as usize)]));
            }
        }
        writeln!(w, "{line}")?;
    }
    Ok(())
}

/// Reads back [`write_banded`] output.
pub fn read_banded(text: &str) -> Option<Matrix> {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let mut head = lines.next()?.split_whitespace();
    let m: usize = head.next()?.parse().ok()?;
    let _b: usize = head.next()?.parse().ok()?;
    let mut x = Matrix::zeros(m, m);
    for line in lines {
        let mut it = line.split_whitespace();
        let d: isize = it.next()?.parse().ok()?;
        let start = if d < 0 { (-d) as usize } else { 0 };
        for (k, v) in it.enumerate() {
            let i = start + k;
            let j = (i as isize + d) as usize;
            if i >= m || j >= m {
                return None;
            }
            x[(i, j)] = v.parse().ok()?;
        }
    }
    Some(x)
}

pub fn write_symbol_csv<W: Write>(mut w: W, s: &SymbolCoeffs) -> io::Result<()> {
    writeln!(w, "k,c_k")?;
    for (k, c) in s.full() {
        writeln!(w, "{k},{}", fmt_f64(c))?;
    }
    Ok(())
}

pub fn write_samples_csv<W: Write>(mut w: W, samples: &[(f64, f64)]) -> io::Result<()> {
    writeln!(w, "theta,value")?;
    for (t, v) in samples {
        writeln!(w, "{t},{}", fmt_f64(*v))?;
    }
    Ok(())
}

pub fn write_samples_2d_csv<W: Write>(mut w: W, samples: &[(f64, f64, f64)]) -> io::Result<()> {
    writeln!(w, "theta_x,theta_y,value")?;
    for (tx, ty, v) in samples {
        writeln!(w, "{tx},{ty},{}", fmt_f64(*v))?;
    }
    Ok(())
}

/// The symbol at `θ_j = -π + 2πj/n`, `j = 0..n`; for even `n` the grid
/// contains both `-π` and `0`.
pub fn symbol_samples(s: &SymbolCoeffs, n: usize) -> Vec<(f64, f64)> {
    use std::f64::consts::PI;
    (0..n)
        .map(|j| {
            let t = -PI + 2.0 * PI * j as f64 / n as f64;
            (t, s.eval(t))
        })
        .collect()
}

pub fn write_values_csv<W: Write>(mut w: W, header: &str, values: &[f64]) -> io::Result<()> {
    writeln!(w, "index,{header}")?;
    for (i, v) in values.iter().enumerate() {
        writeln!(w, "{},{}", i + 1, fmt_f64(*v))?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::toeplitz::toeplitz;

    #[test]
    fn banded_round_trip() {
        let t = toeplitz(6, &SymbolCoeffs::generic(vec![4.0, -1.5, 0.25]));
        let mut buf = Vec::new();
        write_banded(&mut buf, &t).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("6 2\n"));
        assert_eq!(read_banded(&text).unwrap(), t);
    }

    #[test]
    fn float_text() {
        assert_eq!(fmt_f64(0.5), "0.5");
        assert_eq!(fmt_f64(1e-12), "1e-12");
        assert_eq!(fmt_f64(0.0), "0");
        assert_eq!(fmt_f64(f64::INFINITY), "inf");
        assert_eq!(fmt_f64(-2.5e-7), "-2.5e-7");
        for x in [1.0 / 3.0, 2.2e-16, -7.5e20] {
            assert_eq!(fmt_f64(x).parse::<f64>().unwrap(), x);
        }
    }

    #[test]
    fn dense_header() {
        let mut buf = Vec::new();
        write_matrix_csv(&mut buf, &Matrix::identity(2, 2)).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "# size=2\n1,0\n0,1\n");
    }

    #[test]
    fn symbol_rows() {
        let mut buf = Vec::new();
        write_symbol_csv(&mut buf, &SymbolCoeffs::generic(vec![2.0, -1.0])).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "k,c_k\n-1,-1\n0,2\n1,-1\n");
    }
}
