//! Vertical 0/1 transaction database.
//!
//! Each attribute is stored as a [`BitVector`] over row positions. Input is
//! FIMI text: one transaction per line, items as whitespace-separated
//! non-negative integers. Blank lines are skipped. Item identifiers may be
//! sparse; they are remapped to dense column indices in ascending order of
//! the original identifier, and the original id is kept in `item_labels`.

use std::collections::BTreeSet;
use std::io::BufRead;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::bitvec::BitVector;
use crate::error::{Error, Result};

/// Original item identifier as written in the input file.
pub type ItemId = u64;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TransactionDatabase {
    n_rows: usize,
    columns: Vec<BitVector>,
    item_labels: Vec<ItemId>,
}

/// Per-attribute support counts, indexed by dense column.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ColumnMarginals(pub Vec<usize>);

impl ColumnMarginals {
    pub fn total(&self) -> usize {
        self.0.iter().sum()
    }
}

impl TransactionDatabase {
    /// Builds a database from rows of original item ids. Duplicate items in a
    /// row are ignored. Fails if there are no rows.
    pub fn from_rows<R, I>(rows: R) -> Result<Self>
    where
        R: IntoIterator<Item = I>,
        I: IntoIterator<Item = ItemId>,
    {
        let rows: Vec<BTreeSet<ItemId>> = rows
            .into_iter()
            .map(|r| r.into_iter().collect())
            .collect();
        if rows.is_empty() {
            return Err(Error::EmptyDataset);
        }
        let labels: Vec<ItemId> = rows
            .iter()
            .flatten()
            .copied()
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        let n_rows = rows.len();
        let mut columns = vec![BitVector::zeros(n_rows); labels.len()];
        for (r, row) in rows.iter().enumerate() {
            for item in row {
                // labels is sorted and contains every item
                let col = labels.binary_search(item).unwrap();
                columns[col].set(r, true);
            }
        }
        Ok(Self {
            n_rows,
            columns,
            item_labels: labels,
        })
    }

    /// Builds a database directly from columns. Empty columns are dropped so
    /// every materialized attribute has support at least one.
    pub fn from_columns(
        n_rows: usize,
        columns: Vec<BitVector>,
        item_labels: Vec<ItemId>,
    ) -> Result<Self> {
        if n_rows == 0 {
            return Err(Error::EmptyDataset);
        }
        if columns.len() != item_labels.len() {
            return Err(Error::InvalidQuery(format!(
                "{} columns but {} labels",
                columns.len(),
                item_labels.len()
            )));
        }
        if columns.iter().any(|c| c.len() != n_rows) {
            return Err(Error::InvalidQuery(format!(
                "every column must have length {n_rows}"
            )));
        }
        let mut seen = BTreeSet::new();
        if !item_labels.iter().all(|l| seen.insert(*l)) {
            return Err(Error::InvalidQuery("item labels must be distinct".into()));
        }
        let (columns, item_labels) = columns
            .into_iter()
            .zip(item_labels)
            .filter(|(c, _)| c.count_ones() > 0)
            .unzip();
        Ok(Self {
            n_rows,
            columns,
            item_labels,
        })
    }

    #[inline]
    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    #[inline]
    pub fn n_attrs(&self) -> usize {
        self.columns.len()
    }

    #[inline]
    pub fn columns(&self) -> &[BitVector] {
        &self.columns
    }

    #[inline]
    pub fn column(&self, attr: usize) -> Result<&BitVector> {
        self.columns.get(attr).ok_or(Error::AttributeOutOfRange {
            attr,
            n_attrs: self.columns.len(),
        })
    }

    pub fn item_labels(&self) -> &[ItemId] {
        &self.item_labels
    }

    /// Support of a single attribute.
    pub fn support(&self, attr: usize) -> Result<usize> {
        Ok(self.column(attr)?.count_ones())
    }

    /// Support of an itemset given as dense column indices. The empty
    /// itemset has support `n_rows`.
    pub fn itemset_support(&self, attrs: &[usize]) -> Result<usize> {
        let mut mask = BitVector::ones(self.n_rows);
        for &a in attrs {
            mask.and_assign(self.column(a)?);
        }
        Ok(mask.count_ones())
    }

    /// Total number of 1-entries in the 0/1 matrix.
    pub fn total_ones(&self) -> usize {
        self.columns.iter().map(BitVector::count_ones).sum()
    }

    /// Rows as sorted original item ids.
    pub fn rows(&self) -> Vec<Vec<ItemId>> {
        let mut rows = vec![Vec::new(); self.n_rows];
        for (col, label) in self.columns.iter().zip(&self.item_labels) {
            for r in col.iter_ones() {
                rows[r].push(*label);
            }
        }
        // columns are in ascending label order, so rows are already sorted
        rows
    }

    /// Serializes to FIMI text, one line per row, items ascending. A row with
    /// no items becomes an empty line, which the parser skips.
    pub fn to_fimi(&self) -> String {
        let mut out = String::new();
        for row in self.rows() {
            let mut first = true;
            for item in row {
                if !first {
                    out.push(' ');
                }
                first = false;
                out.push_str(&item.to_string());
            }
            out.push('\n');
        }
        out
    }
}

/// Parses FIMI text from a buffered reader.
pub fn parse_fimi<R: BufRead>(reader: R) -> Result<TransactionDatabase> {
    let mut rows = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let line = line?;
        let line_no = idx + 1;
        let mut row = Vec::new();
        for tok in line.split_ascii_whitespace() {
            let item = tok.parse::<ItemId>().map_err(|_| Error::Parse {
                line: line_no,
                message: format!("expected a non-negative integer item, found {tok:?}"),
            })?;
            row.push(item);
        }
        if !row.is_empty() {
            rows.push(row);
        }
    }
    TransactionDatabase::from_rows(rows)
}

/// Parses FIMI text held in memory.
pub fn parse_fimi_str(text: &str) -> Result<TransactionDatabase> {
    parse_fimi(text.as_bytes())
}

/// `popcount(current AND column[attr])`.
pub fn support_of_intersection(
    db: &TransactionDatabase,
    current: &BitVector,
    attr: usize,
) -> Result<usize> {
    let col = db.column(attr)?;
    if current.len() != db.n_rows() {
        return Err(Error::InvalidQuery(format!(
            "support mask has length {} but dataset has {} rows",
            current.len(),
            db.n_rows()
        )));
    }
    Ok(current.and_count(col))
}

pub fn column_marginals(db: &TransactionDatabase) -> ColumnMarginals {
    ColumnMarginals(db.columns.iter().map(BitVector::count_ones).collect())
}

/// Returns a dataset in which every column is an independent uniform random
/// permutation of the corresponding input column. Column supports are kept
/// exactly; all dependence between columns is destroyed.
pub fn randomize_marginals(db: &TransactionDatabase, seed: u64) -> TransactionDatabase {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut bits = vec![false; db.n_rows];
    let columns = db
        .columns
        .iter()
        .map(|col| {
            bits.iter_mut().for_each(|b| *b = false);
            for r in col.iter_ones() {
                bits[r] = true;
            }
            bits.shuffle(&mut rng);
            BitVector::from_positions(
                db.n_rows,
                bits.iter().enumerate().filter(|(_, &b)| b).map(|(i, _)| i),
            )
        })
        .collect();
    TransactionDatabase {
        n_rows: db.n_rows,
        columns,
        item_labels: db.item_labels.clone(),
    }
}
