//! Deterministic reports on `Σ_h`: limit ratios of `S_{≥k}` and the first-quadrant index map.

use num_rational::Ratio;

use crate::blowdown::{blowdown_table, ratio_geq, BlowdownTable};
use crate::error::{Error, Result};
use crate::table::{Cell, Table};

/// `T_k = k(k+1)/2`
pub fn triangular(k: u64) -> u64 {
    k * (k + 1) / 2
}

/// Conjectured limit of `|S_{≥k}| / N_h`, namely `2 / T_k`.
pub fn conjectured_limit(k: u64) -> Ratio<u64> {
    Ratio::new(2, triangular(k))
}

#[derive(Clone, Debug, PartialEq)]
pub struct RatioEntry {
    pub k: u64,
    pub count_geq: usize,
    pub ratio: Ratio<u64>,
}

impl RatioEntry {
    pub fn ratio_f64(&self) -> f64 {
        *self.ratio.numer() as f64 / *self.ratio.denom() as f64
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RatioRow {
    pub h: u32,
    pub n_h: usize,
    /// `k = 2..=k_max`
    pub entries: Vec<RatioEntry>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConjectureReport {
    pub k_max: u64,
    pub rows: Vec<RatioRow>,
}

fn ratio_row(table: &BlowdownTable, k_max: u64) -> RatioRow {
    RatioRow {
        h: table.height(),
        n_h: table.n_rays(),
        entries: (2..=k_max)
            .map(|k| RatioEntry { k, count_geq: table.count_geq(k), ratio: ratio_geq(table, k) })
            .collect(),
    }
}

pub fn conjecture_report(h_values: &[u32], k_max: u64) -> Result<ConjectureReport> {
    if k_max < 2 {
        return Err(Error::Config(format!("k_max must be at least 2, got {k_max}")));
    }
    let rows = h_values.iter().map(|&h| blowdown_table(h).map(|t| ratio_row(&t, k_max))).collect::<Result<_>>()?;
    Ok(ConjectureReport { k_max, rows })
}

fn ratio_f64(r: Ratio<u64>) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

impl ConjectureReport {
    /// Long layout `h,k,count_geq,n_h,ratio,conjectured`.
    pub fn to_table(&self) -> Table {
        let mut t = Table::new(["h", "k", "count_geq", "n_h", "ratio", "conjectured"]);
        for row in &self.rows {
            for e in &row.entries {
                t.push(vec![
                    Cell::from(row.h),
                    Cell::from(e.k),
                    Cell::from(e.count_geq),
                    Cell::from(row.n_h),
                    Cell::from(e.ratio_f64()),
                    Cell::from(ratio_f64(conjectured_limit(e.k))),
                ]);
            }
        }
        t
    }

    /// Wide layout: one line per `h`, one column per `k`, closed by the conjectured limits.
    pub fn to_wide_table(&self) -> Table {
        let mut columns = vec!["h".to_string()];
        columns.extend((2..=self.k_max).map(|k| format!("geq_{k}")));
        let mut t = Table::new(columns);
        for row in &self.rows {
            let mut cells = vec![Cell::from(row.h)];
            cells.extend(row.entries.iter().map(|e| Cell::from(e.ratio_f64())));
            t.push(cells);
        }
        let mut limits = vec![Cell::Text("conjectured".into())];
        limits.extend((2..=self.k_max).map(|k| Cell::from(ratio_f64(conjectured_limit(k)))));
        t.push(limits);
        t
    }
}

/// `(x, y, k)` for every ray of `Σ_h` in the closed first quadrant, in angular order.
pub fn space_report(h: u32) -> Result<Table> {
    let table = blowdown_table(h)?;
    Ok(space_table(&table))
}

pub fn space_table(table: &BlowdownTable) -> Table {
    let mut t = Table::new(["x", "y", "k"]);
    for &(v, k) in table.entries() {
        if v.x() >= 0 && v.y() >= 0 {
            t.push(vec![Cell::Int(v.x()), Cell::Int(v.y()), Cell::from(k)]);
        }
    }
    t
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn conjectured_limits() {
        let got: Vec<_> = (2..=7).map(conjectured_limit).collect();
        let expected = [(2, 3), (2, 6), (2, 10), (2, 15), (2, 21), (2, 28)];
        assert_eq!(got, expected.map(|(n, d)| Ratio::new(n, d)));
        assert_eq!(triangular(1), 1);
    }

    #[test]
    fn space_report_h1() {
        let t = space_report(1).unwrap();
        assert_eq!(t.to_csv(), "x,y,k\n1,0,2\n1,1,1\n0,1,2\n");
    }

    #[test]
    fn space_report_h5_row_count() {
        assert_eq!(space_report(5).unwrap().rows().len(), 21);
    }

    #[test]
    fn report_layouts() {
        let r = conjecture_report(&[20, 30], 4).unwrap();
        assert_eq!(r.rows.len(), 2);
        assert_eq!(r.to_table().rows().len(), 6);
        let wide = r.to_wide_table();
        assert_eq!(wide.columns(), &["h", "geq_2", "geq_3", "geq_4"]);
        assert_eq!(wide.rows().len(), 3);
        assert!(conjecture_report(&[20], 1).is_err());
        for row in &r.rows {
            assert!(row.entries.windows(2).all(|w| w[1].ratio <= w[0].ratio));
        }
    }
}
