//! Tab-separated output tables. Every file starts with `#` comment lines and
//! a header row, so it loads directly into common plotting tools.

use std::io::{self, Write};

use snaprg::stats::{CorrelationFunction, DegreeHistogram, PowerLawFit};

/// Columns: `k_low k_high center count density`; `k_high` is exclusive.
pub fn write_histogram<W: Write>(mut w: W, h: &DegreeHistogram) -> io::Result<()> {
    writeln!(w, "# bin_ratio\t{}", h.ratio)?;
    writeln!(w, "# zero_degree_nodes\t{}", h.zero_count)?;
    writeln!(w, "# nonzero_nodes\t{}", h.n_nonzero)?;
    writeln!(w, "k_low\tk_high\tcenter\tcount\tdensity")?;
    for i in 0..h.n_bins() {
        writeln!(
            w,
            "{}\t{}\t{}\t{}\t{}",
            h.edges[i],
            h.edges[i + 1],
            h.centers[i],
            h.counts[i],
            h.density[i]
        )?;
    }
    Ok(())
}

/// One row per labelled fit; failed fits carry `NA` values and the reason.
pub fn write_fits<W: Write>(
    mut w: W,
    fits: &[(String, Result<PowerLawFit, String>)],
) -> io::Result<()> {
    writeln!(w, "label\tgamma\tstderr\tk_low\tk_high\tr2\tn_bins\tstatus")?;
    for (label, fit) in fits {
        match fit {
            Ok(f) => writeln!(
                w,
                "{label}\t{}\t{}\t{}\t{}\t{}\t{}\tok",
                f.gamma, f.stderr, f.k_low, f.k_high, f.r2, f.n_bins
            )?,
            Err(reason) => writeln!(
                w,
                "{label}\tNA\tNA\tNA\tNA\tNA\tNA\t{}",
                reason.replace(['\t', '\n'], " ")
            )?,
        }
    }
    Ok(())
}

/// Square matrix with labels in the first row and column.
pub fn write_matrix<W: Write>(mut w: W, labels: &[String], m: &[Vec<f64>]) -> io::Result<()> {
    write!(w, "label")?;
    for l in labels {
        write!(w, "\t{l}")?;
    }
    writeln!(w)?;
    for (l, row) in labels.iter().zip(m) {
        write!(w, "{l}")?;
        for v in row {
            write!(w, "\t{v}")?;
        }
        writeln!(w)?;
    }
    Ok(())
}

/// Columns: `d r C stderr C_rescaled stderr_rescaled`, where `d` is in
/// current-frame units, `r = d lambda^n` in original lattice spacings, and
/// the rescaled columns are multiplied by `lambda^(n eta)`.
pub fn write_correlation<W: Write>(
    mut w: W,
    raw: &CorrelationFunction,
    rescaled: &CorrelationFunction,
    eta: f64,
) -> io::Result<()> {
    writeln!(w, "# rg_steps\t{}", raw.n_steps)?;
    writeln!(w, "# scale\t{}", raw.scale)?;
    writeln!(w, "# eta\t{eta}")?;
    writeln!(w, "# rescale_factor\t{}", rescaled.rescale_factor)?;
    writeln!(w, "# snapshots\t{}", raw.n_snapshots)?;
    writeln!(w, "d\tr\tC\tstderr\tC_rescaled\tstderr_rescaled")?;
    let r = raw.physical_separations();
    for (i, (d, r)) in raw.separations.iter().zip(&r).enumerate() {
        writeln!(
            w,
            "{d}\t{r}\t{}\t{}\t{}\t{}",
            raw.values[i], raw.stderr[i], rescaled.values[i], rescaled.stderr[i]
        )?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use snaprg::stats::log_binned_histogram;

    #[test]
    fn histogram_table_shape() {
        let h = log_binned_histogram(&[0, 1, 2, 5], 2.0).unwrap();
        let mut out = Vec::new();
        write_histogram(&mut out, &h).unwrap();
        let text = String::from_utf8(out).unwrap();
        let rows: Vec<&str> = text.lines().filter(|l| !l.starts_with('#')).collect();
        assert_eq!(rows[0], "k_low\tk_high\tcenter\tcount\tdensity");
        assert_eq!(rows.len(), 1 + h.n_bins());
        assert!(text.contains("# zero_degree_nodes\t1"));
    }

    #[test]
    fn failed_fit_row() {
        let mut out = Vec::new();
        write_fits(&mut out, &[("step0".into(), Err("no\twindow".into()))]).unwrap();
        assert!(String::from_utf8(out)
            .unwrap()
            .ends_with("step0\tNA\tNA\tNA\tNA\tNA\tNA\tno window\n"));
    }

    #[test]
    fn matrix_table() {
        let mut out = Vec::new();
        write_matrix(
            &mut out,
            &["a".into(), "b".into()],
            &[vec![0.0, 0.5], vec![0.5, 0.0]],
        )
        .unwrap();
        assert_eq!(
            String::from_utf8(out).unwrap(),
            "label\ta\tb\na\t0\t0.5\nb\t0.5\t0\n"
        );
    }
}
