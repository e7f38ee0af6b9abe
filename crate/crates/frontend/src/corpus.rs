//! The golden corpus: every system and proof the checker ships with,
//! together with machine-checkable expectations. Files are embedded at
//! build time; setting `INDUKT_CORPUS` to a directory overrides the
//! lookup so edited copies can be checked without rebuilding.

use std::collections::BTreeMap;
use std::fmt;

use indukt_core::kernel::{check_proof, CheckReport, MathSystem};
use indukt_core::rsys::check_rderivation;

use crate::files::{parse_proof, parse_rderivation, parse_system, FileError};

pub const ENV_CORPUS: &str = "INDUKT_CORPUS";

static EMBEDDED: &[(&str, &str)] = &[
    ("dual.msys", include_str!("../corpus/dual.msys")),
    ("reverse.msys", include_str!("../corpus/reverse.msys")),
    ("reverse-cd.msys", include_str!("../corpus/reverse-cd.msys")),
    ("spa.msys", include_str!("../corpus/spa.msys")),
    ("pa.msys", include_str!("../corpus/pa.msys")),
    ("celim.msys", include_str!("../corpus/celim.msys")),
    ("dual-101.rproof", include_str!("../corpus/dual-101.rproof")),
    ("spa-add.rproof", include_str!("../corpus/spa-add.rproof")),
    ("ex1.mproof", include_str!("../corpus/ex1.mproof")),
    ("ex2.mproof", include_str!("../corpus/ex2.mproof")),
    ("ex3-invalid.mproof", include_str!("../corpus/ex3-invalid.mproof")),
    ("reverse-1-53.mproof", include_str!("../corpus/reverse-1-53.mproof")),
    ("reverse-1-120.mproof", include_str!("../corpus/reverse-1-120.mproof")),
    ("sec52-fwd.mproof", include_str!("../corpus/sec52-fwd.mproof")),
    ("sec52-bwd.mproof", include_str!("../corpus/sec52-bwd.mproof")),
    ("celim-base.mproof", include_str!("../corpus/celim-base.mproof")),
    ("pa-is-sample.mproof", include_str!("../corpus/pa-is-sample.mproof")),
];

#[derive(Debug, thiserror::Error)]
pub enum CorpusError {
    #[error("no corpus file named `{0}`")]
    NoSuchFile(String),
    #[error("reading {0}: {1}")]
    Io(String, std::io::Error),
    #[error("in {0}: {1}")]
    File(String, FileError),
}

/// Reads a corpus file, honoring the `INDUKT_CORPUS` override.
pub fn read_file(name: &str) -> Result<String, CorpusError> {
    if let Ok(dir) = std::env::var(ENV_CORPUS) {
        let path = std::path::Path::new(&dir).join(name);
        return std::fs::read_to_string(&path)
            .map_err(|e| CorpusError::Io(path.display().to_string(), e));
    }
    EMBEDDED
        .iter()
        .find(|(n, _)| *n == name)
        .map(|(_, text)| text.to_string())
        .ok_or_else(|| CorpusError::NoSuchFile(name.to_string()))
}

pub fn load_system(name: &str) -> Result<MathSystem, CorpusError> {
    let text = read_file(name)?;
    parse_system(&text).map_err(|e| CorpusError::File(name.to_string(), e))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ProofKind {
    Kernel,
    RDerivation,
}

/// One corpus expectation: a proof or derivation file, the system it is
/// checked against, and the verdict it must produce.
pub struct CorpusEntry {
    pub id: &'static str,
    pub system: &'static str,
    pub proof: &'static str,
    pub kind: ProofKind,
    pub expect_accept: bool,
    /// 1-based step at which rejection must occur.
    pub expect_failure_step: Option<usize>,
    /// Substring the failure reason must contain.
    pub expect_reason: Option<&'static str>,
}

pub fn entries() -> Vec<CorpusEntry> {
    use ProofKind::*;
    let ok = |id, system, proof, kind| CorpusEntry {
        id,
        system,
        proof,
        kind,
        expect_accept: true,
        expect_failure_step: None,
        expect_reason: None,
    };
    vec![
        ok("dual-101", "dual.msys", "dual-101.rproof", RDerivation),
        ok("spa-add", "spa.msys", "spa-add.rproof", RDerivation),
        ok("ex1", "dual.msys", "ex1.mproof", Kernel),
        ok("ex2", "dual.msys", "ex2.mproof", Kernel),
        CorpusEntry {
            id: "ex3-invalid",
            system: "dual.msys",
            proof: "ex3-invalid.mproof",
            kind: Kernel,
            expect_accept: false,
            expect_failure_step: Some(1),
            expect_reason: Some("quantifier axiom (3.11)(b): x free in antecedent"),
        },
        ok("reverse-1-53", "reverse.msys", "reverse-1-53.mproof", Kernel),
        ok("reverse-1-120", "reverse-cd.msys", "reverse-1-120.mproof", Kernel),
        ok("sec52-fwd", "dual.msys", "sec52-fwd.mproof", Kernel),
        ok("sec52-bwd", "dual.msys", "sec52-bwd.mproof", Kernel),
        ok("celim-base", "celim.msys", "celim-base.mproof", Kernel),
        ok("pa-is-sample", "pa.msys", "pa-is-sample.mproof", Kernel),
    ]
}

/// Accepted kernel proofs of the corpus, loaded and paired with their
/// systems; the substrate for the translation and soundness sweeps.
pub fn accepted_kernel_proofs(
) -> Result<Vec<(&'static str, MathSystem, indukt_core::kernel::Proof)>, CorpusError> {
    let mut out = Vec::new();
    let mut systems: BTreeMap<&str, MathSystem> = BTreeMap::new();
    for e in entries() {
        if e.kind != ProofKind::Kernel || !e.expect_accept {
            continue;
        }
        if !systems.contains_key(e.system) {
            systems.insert(e.system, load_system(e.system)?);
        }
        let sys = systems[e.system].clone();
        let text = read_file(e.proof)?;
        let proof =
            parse_proof(&text, &sys).map_err(|err| CorpusError::File(e.proof.into(), err))?;
        out.push((e.id, sys, proof));
    }
    Ok(out)
}

pub struct EntryResult {
    pub id: &'static str,
    pub pass: bool,
    pub detail: String,
}

impl fmt::Display for EntryResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {:18} {}",
            if self.pass { "PASS" } else { "FAIL" },
            self.id,
            self.detail
        )
    }
}

fn verdict_matches(entry: &CorpusEntry, report: &CheckReport) -> (bool, String) {
    if entry.expect_accept {
        (report.accepted, report.to_string())
    } else {
        match &report.first_failure {
            None => (false, "accepted but rejection expected".into()),
            Some(sf) => {
                let step_ok =
                    entry.expect_failure_step.map_or(true, |want| sf.step + 1 == want);
                let reason_ok =
                    entry.expect_reason.map_or(true, |want| sf.reason.contains(want));
                (step_ok && reason_ok, report.to_string())
            }
        }
    }
}

/// Checks one corpus entry against its expectations.
pub fn run_entry(entry: &CorpusEntry) -> EntryResult {
    let fail = |detail: String| EntryResult { id: entry.id, pass: false, detail };
    let sys = match load_system(entry.system) {
        Ok(s) => s,
        Err(e) => return fail(e.to_string()),
    };
    let text = match read_file(entry.proof) {
        Ok(t) => t,
        Err(e) => return fail(e.to_string()),
    };
    match entry.kind {
        ProofKind::Kernel => {
            let proof = match parse_proof(&text, &sys) {
                Ok(p) => p,
                Err(e) => return fail(format!("parse: {e}")),
            };
            let report = check_proof(&sys, &proof);
            let (pass, detail) = verdict_matches(entry, &report);
            EntryResult { id: entry.id, pass, detail }
        }
        ProofKind::RDerivation => {
            let deriv = match parse_rderivation(&text, &sys) {
                Ok(d) => d,
                Err(e) => return fail(format!("parse: {e}")),
            };
            let report = check_rderivation(&sys.rsys, &sys.lang, &deriv);
            let pass = report.accepted == entry.expect_accept;
            EntryResult { id: entry.id, pass, detail: report.to_string() }
        }
    }
}
