use std::fmt;
use std::str::FromStr;

/// `GT-` + 8-digit sequence + `-` + mod-97 check digits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PlatformId(u64);

pub const MAX_SEQUENCE: u64 = 99_999_999;

impl PlatformId {
    pub fn new(sequence: u64) -> Option<PlatformId> {
        (1..=MAX_SEQUENCE).contains(&sequence).then_some(PlatformId(sequence))
    }

    pub fn sequence(self) -> u64 {
        self.0
    }

    pub fn check_digits(sequence: u64) -> u64 {
        97 - sequence % 97
    }
}

impl fmt::Display for PlatformId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GT-{:08}-{:02}", self.0, Self::check_digits(self.0))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("`{0}` is not a platform id")]
pub struct BadId(pub String);

impl FromStr for PlatformId {
    type Err = BadId;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || BadId(s.to_string());
        let rest = s.strip_prefix("GT-").ok_or_else(bad)?;
        let (seq, check) = rest.split_once('-').ok_or_else(bad)?;
        if seq.len() != 8 || check.len() != 2 || !(seq.bytes().chain(check.bytes()).all(|b| b.is_ascii_digit())) {
            return Err(bad());
        }
        let seq: u64 = seq.parse().map_err(|_| bad())?;
        let check: u64 = check.parse().map_err(|_| bad())?;
        match PlatformId::new(seq) {
            Some(id) if PlatformId::check_digits(seq) == check => Ok(id),
            _ => Err(bad()),
        }
    }
}
