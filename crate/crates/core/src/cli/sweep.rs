//! `sweep`: witness-existence fraction and moment predictions over a grid of
//! sampling rates.

use serde::{Deserialize, Serialize};

use crate::counting::pair_count_table;
use crate::experiment::moments::variance_ratio_exact_report;
use crate::experiment::{estimate_existence_probability, first_moment, VarianceMode};

use super::SweepConfig;

pub const SWEEP_COLUMNS: [&str; 12] = [
    "p_hat",
    "p",
    "expected_rows",
    "mean_rows",
    "trials",
    "witness_fraction",
    "stderr",
    "zero_row_sampled",
    "ln_first_moment",
    "variance_ratio",
    "variance_mode",
    "chebyshev_bound",
];

/// One grid point. Field order is the CSV column order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub p_hat: f64,
    pub p: f64,
    pub expected_rows: f64,
    pub mean_rows: f64,
    pub trials: u64,
    pub witness_fraction: f64,
    pub stderr: f64,
    pub zero_row_sampled: u64,
    pub ln_first_moment: f64,
    pub variance_ratio: f64,
    pub variance_mode: VarianceMode,
    pub chebyshev_bound: f64,
}

fn header(config: &SweepConfig) -> String {
    let p = &config.params;
    let mut s = String::new();
    s.push_str("# hadamard-kernel sweep\n");
    s.push_str(&format!(
        "# n={} k={} c={} seed={} trials={} points={}\n",
        p.n,
        p.k,
        p.c,
        p.seed,
        config.trials,
        config.grid.len()
    ));
    s.push_str("# p_hat: per-row sampling probability; p = -ln(1 - p_hat)\n");
    s.push_str("# expected_rows: 2^n p_hat; mean_rows: average |Q| over trials\n");
    s.push_str(
        "# witness_fraction: trials with a k-dim V such that Q misses V^perp; stderr: binomial\n",
    );
    s.push_str("# zero_row_sampled: trials with row 0 in Q (no witness possible)\n");
    s.push_str("# ln_first_moment: ln E X; variance_ratio: Var X / (E X)^2 (variance_mode: exact or bound)\n");
    s.push_str("# chebyshev_bound: min(1, variance_ratio), an upper bound on P(X = 0)\n");
    s
}

pub fn sweep_rows(config: &SweepConfig) -> crate::Result<Vec<SweepRow>> {
    let base = &config.params;
    let table = pair_count_table(base.n, base.k)?;
    config
        .grid
        .iter()
        .map(|&p_hat| {
            let params = base.with_p_hat(p_hat)?;
            let est = estimate_existence_probability(&params, config.trials)?;
            let ratio = variance_ratio_exact_report(&params, &table)?;
            Ok(SweepRow {
                p_hat,
                p: params.p,
                expected_rows: params.expected_rows(),
                mean_rows: est.mean_cardinality,
                trials: est.trials,
                witness_fraction: est.fraction,
                stderr: est.stderr,
                zero_row_sampled: est.zero_row_sampled,
                ln_first_moment: first_moment(&params)?,
                variance_ratio: ratio.value,
                variance_mode: ratio.mode,
                chebyshev_bound: ratio.value.min(1.0),
            })
        })
        .collect()
}

pub fn render_sweep(config: &SweepConfig, rows: &[SweepRow]) -> String {
    let mut out = header(config).into_bytes();
    {
        let mut w = csv::Writer::from_writer(&mut out);
        for row in rows {
            w.serialize(row).expect("in-memory csv write");
        }
        w.flush().expect("in-memory csv flush");
    }
    String::from_utf8(out).expect("csv output is utf-8")
}

pub fn cmd_sweep(config: &SweepConfig) -> crate::Result<String> {
    Ok(render_sweep(config, &sweep_rows(config)?))
}

/// Parses sweep output, skipping `#` comment lines.
pub fn parse_sweep_csv(text: &str) -> Result<Vec<SweepRow>, csv::Error> {
    csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_reader(text.as_bytes())
        .deserialize()
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiment::SamplingParams;

    fn config(grid: Vec<f64>) -> SweepConfig {
        SweepConfig {
            params: SamplingParams::new(6, 3, grid[0], 0.1, 7).unwrap(),
            grid,
            trials: 200,
        }
    }

    #[test]
    fn zero_rate_row_has_full_fraction() {
        let c = config(vec![0.0, 0.1, 0.4]);
        let rows = sweep_rows(&c).unwrap();
        assert_eq!(rows[0].witness_fraction, 1.0);
        assert_eq!(rows[0].variance_ratio, 0.0);
        assert_eq!(rows[0].mean_rows, 0.0);
        assert_eq!(rows[1].variance_mode, VarianceMode::Exact);
    }

    #[test]
    fn csv_round_trip() {
        let c = config(vec![0.0, 0.05, 0.2]);
        let text = cmd_sweep(&c).unwrap();
        let header_line = text.lines().find(|l| !l.starts_with('#')).unwrap();
        assert_eq!(header_line, SWEEP_COLUMNS.join(","));
        let rows = parse_sweep_csv(&text).unwrap();
        assert_eq!(rows, sweep_rows(&c).unwrap());
        assert_eq!(render_sweep(&c, &rows), text);
    }
}
