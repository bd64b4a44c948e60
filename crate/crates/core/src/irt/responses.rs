use serde::{Deserialize, Serialize};

use crate::{Error, ItemId, Result};

/// Binary responses of one administration, stored column-major by item.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResponseMatrix {
    n_examinees: usize,
    item_ids: Vec<ItemId>,
    data: Vec<u8>,
}

impl ResponseMatrix {
    /// Builds a matrix from one response column per item.
    pub fn from_columns(item_ids: Vec<ItemId>, columns: Vec<Vec<u8>>) -> Result<Self> {
        if item_ids.len() != columns.len() {
            return Err(Error::MalformedResponses(format!(
                "{} item ids for {} columns",
                item_ids.len(),
                columns.len()
            )));
        }
        let n_examinees = columns.first().map_or(0, Vec::len);
        if n_examinees == 0 {
            return Err(Error::MalformedResponses("no examinees".into()));
        }
        let mut sorted = item_ids.clone();
        sorted.sort_unstable();
        if let Some(w) = sorted.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::DuplicateItem(w[0]));
        }
        let mut data = Vec::with_capacity(n_examinees * columns.len());
        for (id, col) in item_ids.iter().zip(&columns) {
            if col.len() != n_examinees {
                return Err(Error::MalformedResponses(format!(
                    "item {id} has {} responses, expected {n_examinees}",
                    col.len()
                )));
            }
            if col.iter().any(|&y| y > 1) {
                return Err(Error::MalformedResponses(format!(
                    "item {id} has a response other than 0 or 1"
                )));
            }
            data.extend_from_slice(col);
        }
        Ok(Self {
            n_examinees,
            item_ids,
            data,
        })
    }

    pub fn n_examinees(&self) -> usize {
        self.n_examinees
    }

    pub fn item_ids(&self) -> &[ItemId] {
        &self.item_ids
    }

    pub fn n_items(&self) -> usize {
        self.item_ids.len()
    }

    pub fn column_at(&self, index: usize) -> &[u8] {
        &self.data[index * self.n_examinees..(index + 1) * self.n_examinees]
    }

    pub fn column(&self, id: ItemId) -> Option<&[u8]> {
        self.item_ids
            .iter()
            .position(|&i| i == id)
            .map(|index| self.column_at(index))
    }

    /// Sub-matrix with the given items, in the given order.
    pub fn restrict(&self, ids: &[ItemId]) -> Result<Self> {
        let columns = ids
            .iter()
            .map(|&id| {
                self.column(id)
                    .map(<[u8]>::to_vec)
                    .ok_or(Error::UnknownItem(id))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::from_columns(ids.to_vec(), columns)
    }

    /// Responses of examinee `n` across all items.
    pub fn pattern(&self, n: usize) -> Vec<u8> {
        (0..self.item_ids.len())
            .map(|j| self.data[j * self.n_examinees + n])
            .collect()
    }

    /// Percent correct of column `index`.
    pub fn percent_correct_at(&self, index: usize) -> f64 {
        let col = self.column_at(index);
        col.iter().map(|&y| f64::from(y)).sum::<f64>() / col.len() as f64
    }
}
