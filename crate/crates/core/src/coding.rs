//! Adaptive coding: map achieved SIR to normalized throughput through the
//! RM(1,m) rate ladder at a 1e-3 BER target.

use std::io::Write;

use crate::error::{Error, Result};

/// One rung of the rate ladder.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateRow {
    pub m: u32,
    pub rate: f64,
    pub required_sir_db: f64,
}

/// Ordered rate ladder: rate and required SIR both strictly decrease in m.
#[derive(Debug, Clone, PartialEq)]
pub struct RateTable {
    rows: [RateRow; 9],
    pub ber_target: f64,
}

#[rustfmt::skip]
const STANDARD_ROWS: [RateRow; 9] = [
    RateRow { m: 2,  rate: 0.75,   required_sir_db: 6.0 },
    RateRow { m: 3,  rate: 0.5,    required_sir_db: 5.15 },
    RateRow { m: 4,  rate: 0.3125, required_sir_db: 4.6 },
    RateRow { m: 5,  rate: 0.1875, required_sir_db: 4.1 },
    RateRow { m: 6,  rate: 0.1094, required_sir_db: 3.75 },
    RateRow { m: 7,  rate: 0.0625, required_sir_db: 3.45 },
    RateRow { m: 8,  rate: 0.0352, required_sir_db: 3.2 },
    RateRow { m: 9,  rate: 0.0195, required_sir_db: 3.1 },
    RateRow { m: 10, rate: 0.0107, required_sir_db: 2.8 },
];

static STANDARD: RateTable = RateTable {
    rows: STANDARD_ROWS,
    ber_target: 1e-3,
};

impl RateTable {
    /// The built-in ladder.
    pub fn standard() -> &'static RateTable {
        &STANDARD
    }

    pub fn rows(&self) -> &[RateRow] {
        &self.rows
    }

    /// Largest rate whose SIR requirement is met; 0 below the weakest code,
    /// the top rate for an interference-free (infinite) SIR.
    pub fn normalized_throughput(&self, sir_db: f64) -> f64 {
        if sir_db == f64::INFINITY {
            return self.rows[0].rate;
        }
        for row in &self.rows {
            if sir_db >= row.required_sir_db {
                return row.rate;
            }
        }
        0.0
    }

    /// Throughput for a linear-scale SIR; dB conversion happens here and
    /// nowhere else.
    pub fn throughput_for_linear_sir(&self, sir_linear: f64) -> f64 {
        if sir_linear == f64::INFINITY {
            self.rows[0].rate
        } else {
            self.normalized_throughput(10.0 * sir_linear.log10())
        }
    }

    /// SIR requirement for a given m.
    pub fn required_sir_db(&self, m: u32) -> Result<f64> {
        self.rows
            .iter()
            .find(|row| row.m == m)
            .map(|row| row.required_sir_db)
            .ok_or_else(|| Error::InvalidParameter(format!("m must lie in 2..=10, got {m}")))
    }

    /// CSV dump, `m,rate,sir_db` per row.
    pub fn write_csv<W: Write>(&self, w: &mut W) -> std::io::Result<()> {
        writeln!(w, "m,rate,sir_db")?;
        for row in &self.rows {
            writeln!(w, "{},{},{}", row.m, row.rate, row.required_sir_db)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table_lookups() {
        let t = RateTable::standard();
        assert_eq!(t.required_sir_db(2).unwrap(), 6.0);
        assert_eq!(t.required_sir_db(5).unwrap(), 4.1);
        assert_eq!(t.required_sir_db(10).unwrap(), 2.8);
        assert!(t.required_sir_db(1).is_err());
        assert!(t.required_sir_db(11).is_err());
    }

    #[test]
    fn throughput_mapping() {
        let t = RateTable::standard();
        assert_eq!(t.normalized_throughput(6.0), 0.75);
        assert_eq!(t.normalized_throughput(5.15), 0.5);
        assert_eq!(t.normalized_throughput(2.79), 0.0);
        assert_eq!(t.normalized_throughput(f64::INFINITY), 0.75);
        assert_eq!(t.normalized_throughput(100.0), 0.75);
    }

    #[test]
    fn step_behavior_at_every_threshold() {
        let t = RateTable::standard();
        let rows = t.rows();
        for (idx, row) in rows.iter().enumerate() {
            assert_eq!(t.normalized_throughput(row.required_sir_db), row.rate);
            let below = t.normalized_throughput(row.required_sir_db - 0.001);
            let expected = if idx + 1 < rows.len() {
                rows[idx + 1].rate
            } else {
                0.0
            };
            assert_eq!(below, expected);
        }
    }

    #[test]
    fn throughput_monotone_in_sir() {
        let t = RateTable::standard();
        let mut prev = -1.0;
        let mut db = 0.0;
        while db <= 8.0 {
            let thr = t.normalized_throughput(db);
            assert!(thr >= prev);
            prev = thr;
            db += 0.01;
        }
    }

    #[test]
    fn ladder_is_strictly_decreasing() {
        let rows = RateTable::standard().rows();
        for w in rows.windows(2) {
            assert!(w[0].rate > w[1].rate);
            assert!(w[0].required_sir_db > w[1].required_sir_db);
            assert!(w[0].m < w[1].m);
        }
        assert_eq!(rows.len(), 9);
        assert_eq!(RateTable::standard().ber_target, 1e-3);
    }

    #[test]
    fn linear_boundary_conversion() {
        let t = RateTable::standard();
        // 4.0 linear is about 6.02 dB.
        assert_eq!(t.throughput_for_linear_sir(4.0), 0.75);
        assert_eq!(t.throughput_for_linear_sir(f64::INFINITY), 0.75);
        assert_eq!(t.throughput_for_linear_sir(1e-6), 0.0);
    }
}
