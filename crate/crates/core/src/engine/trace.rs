use serde::{Deserialize, Serialize};

/// Work done in one extension round, summed over every source searched.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct IterationRecord {
    pub iteration: usize,
    /// Non-forbidden candidate arcs put to the admissibility predicate.
    pub attempted: u64,
    /// Labels kept in the resulting path matrix.
    pub retained: usize,
    /// Columns spent in rounds `1..=iteration`.
    pub columns: u64,
}

impl IterationRecord {
    /// `II. attempted 14, retained 9, columns 40`
    pub fn render(&self) -> String {
        format!(
            "{}. attempted {}, retained {}, columns {}",
            roman(self.iteration),
            self.attempted,
            self.retained,
            self.columns
        )
    }
}

/// Upper-case Roman numeral; `0` renders as `0`.
pub fn roman(mut n: usize) -> String {
    if n == 0 {
        return "0".into();
    }
    const TABLE: [(usize, &str); 13] = [
        (1000, "M"),
        (900, "CM"),
        (500, "D"),
        (400, "CD"),
        (100, "C"),
        (90, "XC"),
        (50, "L"),
        (40, "XL"),
        (10, "X"),
        (9, "IX"),
        (5, "V"),
        (4, "IV"),
        (1, "I"),
    ];
    let mut out = String::new();
    for &(value, glyph) in &TABLE {
        while n >= value {
            out.push_str(glyph);
            n -= value;
        }
    }
    out
}
