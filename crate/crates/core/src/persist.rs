//! Census files: self-describing JSON with a header of conventions, records in
//! canonical order, and a SHA-256 checksum over the compact serialization.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::census::{
    canonical_order, census_type3, cited_111, psi_formula, records_221, CensusRecord, Provenance, CITED_111,
};
use crate::error::{Error, Result};
use crate::liering::{LieRing, RingFingerprint};
use crate::residue::{least_non_residue, primitive_root, AbelianType, GroupElement};

pub const FORMAT_VERSION: u32 = 1;

pub const CONVENTIONS: [&str; 6] = [
    "residues are least non-negative",
    "elements are row vectors over a basis ordered by non-increasing exponent",
    "endomorphisms act on the right and are stored row-major",
    "bracket table lists [x_i, x_j] for i < j; omitted pairs are zero",
    "unit scalings use the least generator of the units modulo p^k",
    "group commutator (a, b) = a^-1 b^-1 a b",
];

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PartitionChoice {
    One(Vec<u32>),
    All,
}

impl PartitionChoice {
    pub fn parse(s: &str) -> Option<Self> {
        match s.trim() {
            "all" => Some(PartitionChoice::All),
            "1,1,1" => Some(PartitionChoice::One(vec![1, 1, 1])),
            "2,1" => Some(PartitionChoice::One(vec![2, 1])),
            "3" => Some(PartitionChoice::One(vec![3])),
            _ => None,
        }
    }

    pub fn label(&self) -> String {
        match self {
            PartitionChoice::All => "all".into(),
            PartitionChoice::One(p) => partition_label(p),
        }
    }

    pub fn partitions(&self) -> Vec<Vec<u32>> {
        match self {
            PartitionChoice::All => vec![vec![1, 1, 1], vec![2, 1], vec![3]],
            PartitionChoice::One(p) => vec![p.clone()],
        }
    }
}

pub fn partition_label(p: &[u32]) -> String {
    p.iter().map(u32::to_string).collect::<Vec<_>>().join(",")
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CitedCount {
    pub partition: Vec<u32>,
    pub count: u64,
    pub source: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Header {
    pub format_version: u32,
    pub p: u64,
    pub n: u32,
    pub partition: String,
    pub least_non_residue: u64,
    pub least_primitive_root: u64,
    pub conventions: Vec<String>,
    pub cited: Option<CitedCount>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BracketEntry {
    pub pair: [usize; 2],
    pub value: Vec<u64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StoredRecord {
    pub partition: Vec<u32>,
    pub exponents: Vec<u32>,
    pub moduli: Vec<u64>,
    pub brackets: Vec<BracketEntry>,
    pub fingerprint: RingFingerprint,
    pub provenance: Provenance,
}

#[derive(Serialize)]
struct Body<'a> {
    header: &'a Header,
    records: &'a [StoredRecord],
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CensusFile {
    pub header: Header,
    pub records: Vec<StoredRecord>,
    pub checksum: String,
}

fn store(r: &CensusRecord) -> StoredRecord {
    StoredRecord {
        partition: r.partition.clone(),
        exponents: r.ring.ty().exponents().to_vec(),
        moduli: r.ring.ty().moduli().to_vec(),
        brackets: r.ring.table().into_iter().map(|((i, j), c)| BracketEntry { pair: [i, j], value: c.0 }).collect(),
        fingerprint: r.fingerprint.clone(),
        provenance: r.provenance.clone(),
    }
}

pub fn checksum(header: &Header, records: &[StoredRecord]) -> String {
    let body = serde_json::to_vec(&Body { header, records }).expect("census body serializes");
    hex::encode(Sha256::digest(body))
}

fn format_error(location: impl Into<String>, message: impl Into<String>) -> Error {
    Error::Format { location: location.into(), message: message.into() }
}

impl CensusFile {
    pub fn new(p: u64, n: u32, choice: &PartitionChoice, mut records: Vec<CensusRecord>) -> Self {
        canonical_order(&mut records);
        let cited = choice
            .partitions()
            .contains(&vec![1, 1, 1])
            .then(|| CitedCount { partition: vec![1, 1, 1], count: cited_111(p), source: CITED_111.into() });
        let header = Header {
            format_version: FORMAT_VERSION,
            p,
            n,
            partition: choice.label(),
            least_non_residue: least_non_residue(p),
            least_primitive_root: primitive_root(p),
            conventions: CONVENTIONS.iter().map(|s| s.to_string()).collect(),
            cited,
        };
        let records: Vec<StoredRecord> = records.iter().map(store).collect();
        let checksum = checksum(&header, &records);
        CensusFile { header, records, checksum }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("census file serializes");
        s.push('\n');
        s
    }

    /// Parses and checks structure, residues and checksum.
    pub fn from_json(text: &str) -> Result<Self> {
        let file: CensusFile = serde_json::from_str(text)
            .map_err(|e| format_error(format!("line {} column {}", e.line(), e.column()), e.to_string()))?;
        if file.header.format_version != FORMAT_VERSION {
            return Err(format_error("header.format_version", format!("unsupported version {}", file.header.format_version)));
        }
        for (k, r) in file.records.iter().enumerate() {
            check_record_shape(k, r, file.header.p)?;
        }
        let expected = checksum(&file.header, &file.records);
        if expected != file.checksum {
            return Err(format_error(
                "checksum",
                format!("checksum mismatch: file says {}, content hashes to {expected} (records edited or reordered)", file.checksum),
            ));
        }
        Ok(file)
    }

    /// Rebuilds every record, re-validating the ring and recomputing its fingerprint.
    pub fn records(&self) -> Result<Vec<CensusRecord>> {
        let (p, n) = (self.header.p, self.header.n);
        self.records
            .iter()
            .enumerate()
            .map(|(k, r)| {
                let loc = |f: &str| format!("records[{k}].{f}");
                let ty = AbelianType::new(p, r.exponents.clone()).map_err(|e| format_error(loc("exponents"), e.to_string()))?;
                let brackets: Vec<((usize, usize), GroupElement)> =
                    r.brackets.iter().map(|b| ((b.pair[0], b.pair[1]), GroupElement(b.value.clone()))).collect();
                let ring = LieRing::new(ty, &brackets).map_err(|e| format_error(loc("brackets"), e.to_string()))?;
                let record = CensusRecord {
                    p,
                    n,
                    partition: r.partition.clone(),
                    ring,
                    fingerprint: r.fingerprint.clone(),
                    provenance: r.provenance.clone(),
                };
                record.check().map_err(|e| format_error(loc("fingerprint"), e.to_string()))?;
                Ok(record)
            })
            .collect()
    }

    /// (partition label, count) for every requested partition, cited ones included.
    pub fn counts(&self) -> Vec<(String, u64)> {
        let choice = PartitionChoice::parse(&self.header.partition).unwrap_or(PartitionChoice::All);
        choice
            .partitions()
            .into_iter()
            .map(|part| {
                let count = match &self.header.cited {
                    Some(c) if c.partition == part => c.count,
                    _ => self.records.iter().filter(|r| r.partition == part).count() as u64,
                };
                (partition_label(&part), count)
            })
            .collect()
    }

    pub fn summary(&self) -> String {
        let counts = self.counts();
        let total: u64 = counts.iter().map(|(_, c)| c).sum();
        let parts: Vec<String> = counts.iter().map(|(l, c)| format!("({l}): {c}")).collect();
        let mut line = format!("p = {}, n = {}: {}; total {}", self.header.p, self.header.n, parts.join(", "), total);
        if self.header.partition == "all" {
            if let Ok(f) = psi_formula(self.header.p, self.header.n) {
                line.push_str(&format!("; formula {f}"));
            }
        }
        line
    }
}

fn check_record_shape(k: usize, r: &StoredRecord, p: u64) -> Result<()> {
    let loc = |f: String| format!("records[{k}].{f}");
    if r.exponents.len() != r.moduli.len() {
        return Err(format_error(loc("moduli".into()), "one modulus per exponent expected"));
    }
    for (i, (&e, &m)) in r.exponents.iter().zip(&r.moduli).enumerate() {
        if p.checked_pow(e) != Some(m) {
            return Err(format_error(loc(format!("moduli[{i}]")), format!("{m} is not {p}^{e}")));
        }
    }
    let rank = r.moduli.len();
    for (b, entry) in r.brackets.iter().enumerate() {
        let [i, j] = entry.pair;
        if i >= j || j >= rank {
            return Err(format_error(loc(format!("brackets[{b}].pair")), format!("pair ({i}, {j}) is not i < j < {rank}")));
        }
        if entry.value.len() != rank {
            return Err(format_error(loc(format!("brackets[{b}].value")), format!("expected {rank} coordinates")));
        }
        for (c, (&v, &m)) in entry.value.iter().zip(&r.moduli).enumerate() {
            if v >= m {
                return Err(format_error(loc(format!("brackets[{b}].value[{c}]")), format!("residue {v} is not below its modulus {m}")));
            }
        }
    }
    Ok(())
}

/// Runs the census pipeline for the chosen partitions.
pub fn run_census(p: u64, n: u32, choice: &PartitionChoice) -> Result<CensusFile> {
    let mut records = Vec::new();
    for part in choice.partitions() {
        match part.as_slice() {
            [2, 1] => records.extend(records_221(p, n)?),
            [3] => records.extend(census_type3(p, n)?),
            [1, 1, 1] => {
                // Cited count only; validates the parameters.
                psi_formula(p, n)?;
            }
            other => return Err(Error::UnsupportedPartition(other.to_vec())),
        }
    }
    Ok(CensusFile::new(p, n, choice, records))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn roundtrip_is_byte_identical() {
        let file = run_census(5, 7, &PartitionChoice::One(vec![3])).unwrap();
        let text = file.to_json();
        let back = CensusFile::from_json(&text).unwrap();
        assert_eq!(back, file);
        assert_eq!(back.to_json(), text);
        let records = back.records().unwrap();
        assert_eq!(records.len(), 6);
        assert_eq!(CensusFile::new(5, 7, &PartitionChoice::One(vec![3]), records).to_json(), text);
        assert!(!text.contains('.'), "no floats or fractional values");
    }

    #[test]
    fn residue_out_of_range() {
        let mut file = run_census(5, 7, &PartitionChoice::One(vec![3])).unwrap();
        let entry = file.records.iter_mut().flat_map(|r| r.brackets.iter_mut()).next().unwrap();
        entry.value[0] = 5u64.pow(6);
        match CensusFile::from_json(&file.to_json()) {
            Err(Error::Format { location, message }) => {
                assert!(location.contains("brackets[0].value[0]"), "{location}");
                assert!(message.contains("modulus"));
            }
            other => panic!("expected a format error, got {other:?}"),
        }
    }

    #[test]
    fn reordering_breaks_checksum() {
        let mut file = run_census(5, 7, &PartitionChoice::One(vec![3])).unwrap();
        file.records.swap(0, 1);
        match CensusFile::from_json(&file.to_json()) {
            Err(Error::Format { location, message }) => {
                assert_eq!(location, "checksum");
                assert!(message.contains("mismatch"));
            }
            other => panic!("expected a checksum error, got {other:?}"),
        }
    }

    #[test]
    fn malformed_json_reports_position() {
        match CensusFile::from_json("{\n  \"header\": 3\n}") {
            Err(Error::Format { location, .. }) => assert!(location.starts_with("line 2")),
            other => panic!("expected a format error, got {other:?}"),
        }
    }

    #[test]
    fn cited_partition_has_no_records() {
        let file = run_census(7, 8, &PartitionChoice::One(vec![1, 1, 1])).unwrap();
        assert!(file.records.is_empty());
        assert_eq!(file.counts(), vec![("1,1,1".to_string(), 23 + 2 * 3 + 2)]);
    }

    #[test]
    fn partition_choices() {
        assert_eq!(PartitionChoice::parse("2,1"), Some(PartitionChoice::One(vec![2, 1])));
        assert_eq!(PartitionChoice::parse("all"), Some(PartitionChoice::All));
        assert_eq!(PartitionChoice::parse("4"), None);
    }
}
