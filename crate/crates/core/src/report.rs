//! Three-valued outcome shared by every check.

use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Status {
    Pass,
    /// The resolution budget ran out before the check could be decided.
    Inconclusive,
    Fail,
}

impl Status {
    /// Worst of two outcomes: any failure fails, otherwise any unresolved
    /// check makes the whole inconclusive.
    pub fn and(self, other: Status) -> Status {
        self.max(other)
    }

    pub fn all(items: impl IntoIterator<Item = Status>) -> Status {
        items.into_iter().fold(Status::Pass, Status::and)
    }
}

impl std::fmt::Display for Status {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Status::Pass => "PASS",
            Status::Inconclusive => "INCONCLUSIVE",
            Status::Fail => "FAIL",
        })
    }
}

#[cfg(test)]
mod tests {
    use super::Status;

    #[test]
    fn combination() {
        assert_eq!(Status::all([]), Status::Pass);
        assert_eq!(Status::all([Status::Pass, Status::Inconclusive]), Status::Inconclusive);
        assert_eq!(Status::all([Status::Inconclusive, Status::Fail]), Status::Fail);
    }
}
