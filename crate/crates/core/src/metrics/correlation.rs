use std::collections::BTreeSet;

use super::MetricsError;
use crate::grouping::GroupingStrategy;

/// Sample Pearson correlation coefficient.
pub fn pearson(x: &[f64], y: &[f64]) -> Result<f64, MetricsError> {
    if x.len() != y.len() {
        return Err(MetricsError::LengthMismatch(x.len(), y.len()));
    }
    if x.len() < 2 {
        return Err(MetricsError::TooFewPoints(x.len()));
    }
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        let (dx, dy) = (a - mx, b - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(MetricsError::ConstantVector);
    }
    Ok((sxy / (sxx.sqrt() * syy.sqrt())).clamp(-1.0, 1.0))
}

/// Arithmetic mean of the twelve wheel-based F scores (M1, M2 and the ten
/// M3 variants). Any missing, extra or repeated strategy is an error.
pub fn m_avg(scores: &[(GroupingStrategy, f64)]) -> Result<f64, MetricsError> {
    let required: BTreeSet<GroupingStrategy> = GroupingStrategy::wheel_based().into_iter().collect();
    let mut seen = BTreeSet::new();
    for (s, _) in scores {
        let slot = s.slot();
        if !required.contains(&slot) {
            return Err(MetricsError::MAvgKeys(format!("unexpected strategy {s}")));
        }
        if !seen.insert(slot) {
            return Err(MetricsError::MAvgKeys(format!("strategy {s} given twice")));
        }
    }
    let missing: Vec<String> = required.difference(&seen).map(|s| s.to_string()).collect();
    if !missing.is_empty() {
        return Err(MetricsError::MAvgKeys(format!("missing {}", missing.join(", "))));
    }
    Ok(scores.iter().map(|(_, v)| v).sum::<f64>() / scores.len() as f64)
}

/// A numeric table: named rows (e.g. models) by named columns (e.g. metrics).
#[derive(Debug, Clone, PartialEq)]
pub struct ScoreTable {
    pub row_header: String,
    pub rows: Vec<String>,
    pub columns: Vec<String>,
    /// column-major values
    pub values: Vec<Vec<f64>>,
}

/// Correlation of one column against a reference column.
#[derive(Debug, Clone, PartialEq)]
pub struct ColumnCorrelation {
    pub column: String,
    pub pcc: f64,
}

impl ScoreTable {
    /// Parses a CSV whose first column names the rows and whose other
    /// columns are numeric.
    pub fn parse_csv(text: &str) -> Result<Self, MetricsError> {
        let bad = |m: String| MetricsError::TableFormat(m);
        let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(text.as_bytes());
        let header = rdr.headers().map_err(|e| bad(e.to_string()))?.clone();
        if header.len() < 2 {
            return Err(bad("need a row-name column and at least one value column".into()));
        }
        let columns: Vec<String> = header.iter().skip(1).map(str::to_string).collect();
        let mut values = vec![Vec::new(); columns.len()];
        let mut rows = Vec::new();
        for (i, rec) in rdr.records().enumerate() {
            let rec = rec.map_err(|e| bad(e.to_string()))?;
            rows.push(rec[0].to_string());
            for (c, cell) in rec.iter().skip(1).enumerate() {
                let v: f64 = cell
                    .parse()
                    .map_err(|_| bad(format!("row {}: column {:?}: not a number: {cell:?}", i + 2, columns[c])))?;
                values[c].push(v);
            }
        }
        Ok(ScoreTable { row_header: header[0].to_string(), rows, columns, values })
    }

    pub fn column(&self, name: &str) -> Result<&[f64], MetricsError> {
        self.columns
            .iter()
            .position(|c| c == name)
            .map(|i| self.values[i].as_slice())
            .ok_or_else(|| MetricsError::TableFormat(format!("no column named {name:?}")))
    }

    /// Appends an `M-avg` column computed row by row from the twelve
    /// wheel-based strategy columns.
    pub fn with_m_avg(mut self) -> Result<Self, MetricsError> {
        let strat_cols: Vec<(usize, GroupingStrategy)> = self
            .columns
            .iter()
            .enumerate()
            .filter_map(|(i, c)| c.parse::<GroupingStrategy>().ok().map(|s| (i, s)))
            .filter(|(_, s)| !matches!(s, GroupingStrategy::GptCached { .. }))
            .collect();
        let mut col = Vec::with_capacity(self.rows.len());
        for r in 0..self.rows.len() {
            let scores: Vec<(GroupingStrategy, f64)> =
                strat_cols.iter().map(|(i, s)| (s.clone(), self.values[*i][r])).collect();
            col.push(m_avg(&scores)?);
        }
        self.columns.push("M-avg".into());
        self.values.push(col);
        Ok(self)
    }

    /// Pearson correlation of every other column against `reference`.
    pub fn correlate_against(&self, reference: &str) -> Result<Vec<ColumnCorrelation>, MetricsError> {
        let base = self.column(reference)?;
        self.columns
            .iter()
            .zip(&self.values)
            .filter(|(c, _)| c.as_str() != reference)
            .map(|(c, v)| Ok(ColumnCorrelation { column: c.clone(), pcc: pearson(base, v)? }))
            .collect()
    }

    /// Full column-by-column correlation matrix.
    #[allow(clippy::needless_range_loop)]
    pub fn correlation_matrix(&self) -> Result<Vec<Vec<f64>>, MetricsError> {
        let k = self.columns.len();
        let mut m = vec![vec![1.0; k]; k];
        for i in 0..k {
            for j in i + 1..k {
                let r = pearson(&self.values[i], &self.values[j])?;
                m[i][j] = r;
                m[j][i] = r;
            }
        }
        Ok(m)
    }
}
