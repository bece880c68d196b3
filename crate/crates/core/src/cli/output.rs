//! CSV emission. Floats are written with 17 significant digits so that
//! identical runs give identical bytes.

use std::fmt::Write as _;
use std::io::Write;
use std::path::Path;

use crate::propagate::Trajectory;

pub const TWO_GUIDE_HEADER: &str = "z_over_L,re_c1,im_c1,re_c2,im_c2,I1,I2";
pub const THREE_GUIDE_HEADER: &str = "z_over_L,re_c1,im_c1,re_c2,im_c2,re_c3,im_c3,I1,I2,I3";
pub const SWEEP_HEADER: &str = "omega0_L,delta0_L,I2";

pub fn num(x: f64) -> String {
    format!("{x:.16e}")
}

fn row(out: &mut String, cells: impl IntoIterator<Item = f64>) {
    let mut first = true;
    for c in cells {
        if !first {
            out.push(',');
        }
        first = false;
        out.push_str(&num(c));
    }
    out.push('\n');
}

pub fn trajectory_csv<const N: usize>(traj: &Trajectory<N>) -> String {
    let mut out = String::new();
    out.push_str(if N == 3 {
        THREE_GUIDE_HEADER
    } else {
        TWO_GUIDE_HEADER
    });
    out.push('\n');
    for s in &traj.samples {
        let mut cells = vec![s.z];
        for a in s.amplitudes {
            cells.extend([a.re, a.im]);
        }
        cells.extend(s.intensities());
        row(&mut out, cells);
    }
    out
}

/// Rows of (Ω₀L, Δ₀L, values…) under the given header.
pub fn table_csv(header: &str, rows: &[(f64, f64, Vec<f64>)]) -> String {
    let mut out = String::with_capacity(64 * (rows.len() + 1));
    let _ = writeln!(out, "{header}");
    for (w, d, values) in rows {
        row(&mut out, [*w, *d].into_iter().chain(values.iter().copied()));
    }
    out
}

/// Writes to `path`, or stdout when there is none.
pub fn emit(path: Option<&Path>, text: &str) -> std::io::Result<()> {
    match path {
        Some(p) => std::fs::write(p, text),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            stdout.flush()
        }
    }
}
