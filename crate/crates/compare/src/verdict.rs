use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Ordering {
    /// `≤`
    #[serde(rename = "<=")]
    AtMost,
    /// `>`
    #[serde(rename = ">")]
    Greater,
    #[serde(rename = "inconclusive")]
    Inconclusive,
}

/// One condition value, labelled by the support point it was evaluated at.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellValue {
    pub label: String,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonVerdict {
    pub condition: String,
    /// Every component of the condition holds.
    pub holds_everywhere: bool,
    /// No component holds.
    pub holds_nowhere: bool,
    pub values: Vec<CellValue>,
    pub ordering: Ordering,
}
