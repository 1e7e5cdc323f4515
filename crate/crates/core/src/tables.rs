//! Published reference counts, embedded so verification needs no external data.

use std::sync::Arc;

use crate::eqmodel::EquationSpec;
use crate::error::{Error, Result};
use crate::gf::{prime_power, Elem, FieldTable};

/// Whether the row's `b` must lie outside or inside the `k_0`-th powers.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BClass {
    NonPower,
    Power,
}

#[derive(Debug, Clone, Copy)]
pub struct TableRow {
    pub class: BClass,
    pub q: u64,
    pub a: &'static [u64],
    pub m: &'static [u64],
    pub kj: &'static [u64],
    pub k: u64,
    pub k0: u64,
    pub expected: u64,
    /// Deviation from the published row, if any.
    pub note: Option<&'static str>,
}

use BClass::{NonPower, Power};

#[allow(clippy::too_many_arguments)]
const fn row(
    class: BClass,
    q: u64,
    a: &'static [u64],
    m: &'static [u64],
    kj: &'static [u64],
    k: u64,
    k0: u64,
    expected: u64,
) -> TableRow {
    TableRow { class, q, a, m, kj, k, k0, expected, note: None }
}

/// Seven rows with `b` not a `k_0`-th power, then seven with `b` a `k_0`-th power.
pub const ROWS: [TableRow; 14] = [
    // published, b non-power, row 1
    row(NonPower, 16, &[1, 1, 1, 1, 1], &[2, 4, 6, 8, 10], &[5, 5, 10, 10, 10], 10, 5, 18076),
    // published, b non-power, row 2
    row(NonPower, 17, &[1, 1, 1, 1, 3, 5], &[2, 6, 6, 8, 10, 14], &[4, 4, 8, 8, 8, 12], 8, 4, 433249),
    // published, b non-power, row 3
    row(NonPower, 19, &[1, 1, 1, 2, 2, 2], &[2, 2, 2, 6, 14, 14], &[3, 3, 3, 3, 6, 9], 6, 3, 684901),
    // published, b non-power, row 4; the source prints six coefficients for n = 5
    TableRow {
        note: Some("coefficient list printed with six entries for n = 5; five 1s used"),
        ..row(NonPower, 25, &[1, 1, 1, 1, 1], &[3, 9, 10, 15, 18], &[4, 4, 8, 12, 16], 8, 4, 81553)
    },
    // published, b non-power, row 5
    row(NonPower, 31, &[1, 1, 5, 7], &[5, 7, 9, 11], &[2, 4, 6, 8], 10, 2, 3661),
    // published, b non-power, row 6
    row(NonPower, 43, &[1, 1, 2, 2, 3], &[5, 8, 8, 12, 28], &[7, 7, 14, 14, 28], 21, 7, 377665),
    // published, b non-power, row 7
    row(NonPower, 81, &[1, 1, 1, 1], &[4, 4, 12, 28], &[8, 8, 16, 32], 24, 8, 7041),
    // published, b power, row 1
    row(Power, 37, &[1, 1, 1, 2, 2, 2], &[1, 2, 2, 2, 4, 6], &[9, 9, 9, 9, 9, 18], 9, 9, 539998021),
    // published, b power, row 2
    row(Power, 47, &[1, 1, 1, 5, 5], &[3, 7, 8, 12, 14], &[2, 4, 6, 8, 10], 4, 2, 9261921),
    // published, b power, row 3
    row(Power, 61, &[1, 1, 1, 2], &[6, 8, 10, 14], &[6, 6, 6, 6], 12, 6, 1289641),
    // published, b power, row 4
    row(Power, 64, &[1, 1, 1, 1], &[9, 18, 27, 36], &[3, 3, 3, 3], 12, 3, 781975),
    // published, b power, row 5
    row(Power, 71, &[1, 1, 1], &[3, 15, 49], &[7, 21, 28], 35, 7, 34028),
    // published, b power, row 6
    row(Power, 81, &[1, 1, 1, 1, 1], &[3, 15, 30, 35, 70], &[5, 5, 15, 15, 20], 25, 5, 205707971),
    // published, b power, row 7
    row(Power, 97, &[1, 7, 7], &[2, 10, 12], &[4, 4, 4], 8, 4, 36673),
];

/// Nonzero elements in (`power`) or outside (`!power`) the `t`-th powers, by encoding.
pub fn class_members(field: &FieldTable, t: u64, power: bool) -> Result<Vec<Elem>> {
    field
        .nonzero()
        .filter_map(|x| match field.is_kth_power(x, t) {
            Ok(is) if is == power => Some(Ok(x)),
            Ok(_) => None,
            Err(e) => Some(Err(e)),
        })
        .collect()
}

impl TableRow {
    pub fn label(&self) -> String {
        let class = match self.class {
            NonPower => "nonpower",
            Power => "power",
        };
        format!("{class} q={} n={}", self.q, self.a.len())
    }

    pub fn field(&self) -> Result<FieldTable> {
        let (p, s) = prime_power(self.q)
            .ok_or_else(|| Error::InvalidSpec(format!("{} is not a prime power", self.q)))?;
        FieldTable::build(p, s, None)
    }

    /// The row's equation with the given `b`.
    pub fn spec(&self, field: &Arc<FieldTable>, b: Elem) -> Result<EquationSpec> {
        let a = self.a.iter().map(|&c| field.element(c)).collect::<Result<_>>()?;
        EquationSpec::new(field.clone(), a, b, self.m.to_vec(), self.kj.to_vec(), self.k)
    }

    /// Up to `count` admissible values of `b`, smallest encodings first.
    pub fn representatives(&self, field: &FieldTable, count: usize) -> Result<Vec<Elem>> {
        let mut all = class_members(field, self.k0, self.class == Power)?;
        all.truncate(count);
        Ok(all)
    }
}
