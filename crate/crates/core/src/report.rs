//! Report documents and their encodings.
//!
//! Every JSON document is wrapped in an [`Envelope`] carrying the schema
//! version, the tool version and the configuration that produced it. Nothing
//! time- or machine-dependent is serialized, so equal inputs give equal bytes.
//!
//! Profile sets are written as hex strings: bit `k` stands for profile code
//! `k`, bytes are little-endian and bits within a byte are least significant
//! first.

use std::io::Write;

use fixedbitset::FixedBitSet;
use serde::Serialize;

use crate::classification::{classify_all, dictatorial_profiles, ClassifyOptions};
use crate::constructions::{CensusReport, Mode, RuleCertificate, VerificationReport};
use crate::domain::Profile;
use crate::error::{Error, Result};
use crate::limits::Limits;
use crate::rules::{self, ManipulationWitness, Repr, Rule};

pub const SCHEMA_VERSION: u32 = 1;

/// The settings a report was produced with.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RunConfig {
    pub command: String,
    pub agents: Option<usize>,
    pub alts: Option<usize>,
    pub rule: Option<String>,
    pub filters: Vec<String>,
    pub mode: Option<Mode>,
    /// As requested; `None` means the machine's parallelism.
    pub workers: Option<usize>,
    pub limits: Limits,
}

#[derive(Debug, Serialize)]
pub struct Envelope<'a, T: Serialize> {
    pub schema_version: u32,
    pub tool: &'static str,
    pub tool_version: &'static str,
    pub config: &'a RunConfig,
    pub result: &'a T,
}

impl<'a, T: Serialize> Envelope<'a, T> {
    pub fn new(config: &'a RunConfig, result: &'a T) -> Self {
        Envelope {
            schema_version: SCHEMA_VERSION,
            tool: env!("CARGO_PKG_NAME"),
            tool_version: env!("CARGO_PKG_VERSION"),
            config,
            result,
        }
    }

    pub fn write_json(&self, out: &mut dyn Write) -> Result<()> {
        serde_json::to_writer_pretty(&mut *out, self).map_err(|e| Error::Config(e.to_string()))?;
        writeln!(out).map_err(io_error)
    }
}

pub(crate) fn io_error(e: std::io::Error) -> Error {
    Error::Config(format!("write failed: {e}"))
}

/// Hex encoding of the first `len` bits of `set`.
pub fn bitset_hex(set: &FixedBitSet, len: usize) -> String {
    let mut bytes = vec![0u8; len.div_ceil(8)];
    for k in set.ones().filter(|&k| k < len) {
        bytes[k / 8] |= 1 << (k % 8);
    }
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

/// Inverse of [`bitset_hex`].
pub fn bitset_from_hex(hex: &str, len: usize) -> Result<FixedBitSet> {
    if hex.len() != len.div_ceil(8) * 2 {
        return Err(Error::parse(0, format!("expected {} hex digits", len.div_ceil(8) * 2)));
    }
    let mut set = FixedBitSet::with_capacity(len);
    for (i, pair) in hex.as_bytes().chunks(2).enumerate() {
        let text = std::str::from_utf8(pair).map_err(|_| Error::parse(2 * i, "not hex"))?;
        let byte = u8::from_str_radix(text, 16).map_err(|_| Error::parse(2 * i, "not hex"))?;
        for bit in 0..8 {
            if byte & (1 << bit) != 0 {
                let k = 8 * i + bit;
                if k >= len {
                    return Err(Error::parse(2 * i, "bit past the end of the set"));
                }
                set.insert(k);
            }
        }
    }
    Ok(set)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ManipulableExample {
    pub profile: Profile,
    pub witness: ManipulationWitness,
}

/// Classification of every profile of one rule.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ClassificationReport {
    pub rule: Rule,
    pub agents: usize,
    pub alts: usize,
    pub unanimous: bool,
    pub tops_only: bool,
    pub total: u64,
    /// `|M_f|`; absent for rules that are not tops-only.
    pub m_count: Option<u64>,
    /// `|D_f|`
    pub d_count: u64,
    pub first_manipulable: Option<ManipulableExample>,
    pub first_dictatorial: Option<Profile>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub manipulable_set: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dictatorial_set: Option<String>,
    pub notes: Vec<String>,
}

impl ClassificationReport {
    pub fn build(rule: &Rule, sets: bool) -> Result<Self> {
        let dims = rule.dims();
        let tops_only = rules::is_tops_only(rule)?;
        let unanimous = rules::is_unanimous(rule)?;
        let total = dims.profile_count() as u64;
        let mut notes = Vec::new();
        if !unanimous {
            notes.push("rule is not unanimous".to_string());
        }
        if tops_only {
            let s = classify_all(rule, ClassifyOptions { materialize: sets })?;
            let hex = |set: &Option<FixedBitSet>| set.as_ref().map(|b| bitset_hex(b, total as usize));
            Ok(ClassificationReport {
                rule: rule.clone(),
                agents: dims.agents,
                alts: dims.alts,
                unanimous,
                tops_only,
                total,
                m_count: Some(s.manipulable),
                d_count: s.dictatorial,
                first_manipulable: s
                    .first_manipulable
                    .map(|(profile, witness)| ManipulableExample { profile, witness }),
                first_dictatorial: s.first_dictatorial,
                manipulable_set: hex(&s.manipulable_set),
                dictatorial_set: hex(&s.dictatorial_set),
                notes,
            })
        } else {
            notes.push("manipulable profiles are defined for tops-only rules only".to_string());
            let d = dictatorial_profiles(rule)?;
            let first_dictatorial = d.ones().next().map(|k| Profile::from_code(dims, k as u64)).transpose()?;
            Ok(ClassificationReport {
                rule: rule.clone(),
                agents: dims.agents,
                alts: dims.alts,
                unanimous,
                tops_only,
                total,
                m_count: None,
                d_count: d.count_ones(..) as u64,
                first_manipulable: None,
                first_dictatorial,
                manipulable_set: None,
                dictatorial_set: sets.then(|| bitset_hex(&d, total as usize)),
                notes,
            })
        }
    }
}

/// What `inspect` prints about a rule.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct InspectReport {
    pub rule: Rule,
    pub kind: &'static str,
    /// The same function as a tops table, when it is tops-only.
    pub tops_table: Option<Rule>,
    pub certificate: RuleCertificate,
}

impl InspectReport {
    pub fn build(rule: &Rule) -> Result<Self> {
        let kind = match rule.repr() {
            Repr::TopsTable(_) => "tops-table",
            Repr::FullTable(_) => "full-table",
            Repr::Dictator(_) => "dictator",
            Repr::Constant(_) => "constant",
            Repr::BordaLex => "borda",
            Repr::MajorityLex => "majority",
        };
        let certificate = RuleCertificate::for_rule(rule)?;
        let tops_table = if certificate.tops_only {
            Some(rule.to_tops_table()?)
        } else {
            None
        };
        Ok(InspectReport {
            rule: rule.clone(),
            kind,
            tops_table,
            certificate,
        })
    }
}

fn csv_error(e: csv::Error) -> Error {
    Error::Config(format!("csv: {e}"))
}

/// One row per rule when the census kept rows, otherwise one summary row.
pub fn write_census_csv(report: &CensusReport, out: &mut dyn Write) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    match &report.rows {
        Some(rows) => {
            w.write_record([
                "id",
                "rule",
                "unanimous",
                "efficient",
                "strategy_proof",
                "dictatorial",
                "manipulable_profiles",
                "dictatorial_profiles",
            ])
            .map_err(csv_error)?;
            for r in rows {
                w.write_record([
                    r.id.to_string(),
                    r.rule.to_string(),
                    r.unanimous.to_string(),
                    r.efficient.to_string(),
                    r.strategy_proof.to_string(),
                    r.dictatorial.to_string(),
                    r.manipulable_profiles.to_string(),
                    r.dictatorial_profiles.to_string(),
                ])
                .map_err(csv_error)?;
            }
        }
        None => {
            let c = &report.counts;
            w.write_record([
                "agents",
                "alts",
                "mode",
                "total",
                "unanimous",
                "tops_efficient",
                "strategy_proof",
                "dictatorial",
                "theorem_holds",
            ])
            .map_err(csv_error)?;
            w.write_record([
                report.agents.to_string(),
                report.alts.to_string(),
                report.mode.to_string(),
                c.total.to_string(),
                c.unanimous.to_string(),
                c.tops_efficient.to_string(),
                c.strategy_proof.to_string(),
                c.dictatorial.to_string(),
                report.theorem_holds.to_string(),
            ])
            .map_err(csv_error)?;
        }
    }
    w.flush().map_err(io_error)
}

pub fn write_lemmas_csv(reports: &[VerificationReport], out: &mut dyn Write) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["lemma", "status", "agents", "alts", "mode", "checked"])
        .map_err(csv_error)?;
    for r in reports {
        let checked = r
            .checked
            .iter()
            .map(|(k, v)| format!("{k}={v}"))
            .collect::<Vec<_>>()
            .join(";");
        w.write_record([
            r.lemma.name().to_string(),
            if r.passed() { "pass" } else { "fail" }.to_string(),
            r.scope.agents.to_string(),
            r.scope.alts.to_string(),
            r.scope.mode.to_string(),
            checked,
        ])
        .map_err(csv_error)?;
    }
    w.flush().map_err(io_error)
}

/// One row per profile: code, profile, outcome, verdict.
pub fn write_classification_csv(report: &ClassificationReport, out: &mut dyn Write) -> Result<()> {
    let dims = report.rule.dims();
    let total = report.total as usize;
    let d = match &report.dictatorial_set {
        Some(hex) => bitset_from_hex(hex, total)?,
        None => dictatorial_profiles(&report.rule)?,
    };
    let m = report
        .manipulable_set
        .as_ref()
        .map(|hex| bitset_from_hex(hex, total))
        .transpose()?;
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["code", "profile", "outcome", "dictatorial", "manipulable"])
        .map_err(csv_error)?;
    for code in 0..total {
        let p = Profile::from_code(dims, code as u64)?;
        let manipulable = match (&m, report.tops_only) {
            (Some(m), _) => m.contains(code).to_string(),
            (None, true) => (!d.contains(code)).to_string(),
            (None, false) => String::new(),
        };
        w.write_record([
            code.to_string(),
            p.to_string(),
            report.rule.evaluate(&p)?.to_string(),
            d.contains(code).to_string(),
            manipulable,
        ])
        .map_err(csv_error)?;
    }
    w.flush().map_err(io_error)
}
