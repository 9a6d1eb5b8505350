//! Deterministic reports: plain text with CSV blocks, a content hash over
//! everything except wall time, and the dispatcher from validated jobs to
//! the owning modules.

use rayon::prelude::*;
use sha2::{Digest, Sha256};

use crate::cech;
use crate::complex::ModuleInvariants;
use crate::crystalline::{
    crystalline_via_lift, mod_p_comparison, CrystallineTable, LiftSpec, ModpComparison,
};
use crate::derham;
use crate::envelope::{regularity_probe, EnvelopeAlgebra, RegularQuotientPresentation};
use crate::error::{Error, Result};
use crate::job::{JobCommand, JobSpec};

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Assembled result of one job: tables, verdicts, and a content hash that
/// is byte-stable across runs and thread counts (wall time is excluded).
#[derive(Debug, Clone)]
pub struct Report {
    pub command: String,
    pub job_echo: String,
    pub tables: Vec<(String, String)>,
    pub verdicts: Vec<(String, bool)>,
    pub wall_ms: u128,
}

impl Report {
    pub fn new(command: &str, job_echo: &str) -> Self {
        Report {
            command: command.to_string(),
            job_echo: job_echo.to_string(),
            tables: Vec::new(),
            verdicts: Vec::new(),
            wall_ms: 0,
        }
    }

    pub fn add_table(&mut self, title: &str, csv: String) {
        self.tables.push((title.to_string(), csv));
    }

    pub fn add_verdict(&mut self, name: &str, pass: bool) {
        self.verdicts.push((name.to_string(), pass));
    }

    pub fn passed(&self) -> bool {
        self.verdicts.iter().all(|(_, p)| *p)
    }

    /// The hashed portion: everything except wall time and the hash line.
    fn hashable(&self) -> String {
        let mut s = String::new();
        s.push_str(&format!("pdcohom report\nversion: {TOOL_VERSION}\n"));
        s.push_str(&format!("command: {}\n", self.command));
        s.push_str(&format!("job: {}\n", self.job_echo));
        for (title, csv) in &self.tables {
            s.push_str(&format!("--- table: {title}\n"));
            s.push_str(csv);
            if !csv.ends_with('\n') {
                s.push('\n');
            }
        }
        s.push_str("--- verdicts\n");
        for (name, pass) in &self.verdicts {
            s.push_str(&format!("{name}: {}\n", if *pass { "pass" } else { "FAIL" }));
        }
        s.push_str(&format!(
            "overall: {}\n",
            if self.passed() { "pass" } else { "FAIL" }
        ));
        s
    }

    pub fn content_hash(&self) -> String {
        let mut hasher = Sha256::new();
        hasher.update(self.hashable().as_bytes());
        format!("sha256:{:x}", hasher.finalize())
    }

    pub fn render(&self) -> String {
        let mut s = self.hashable();
        s.push_str(&format!("wall_time_ms: {}\n", self.wall_ms));
        s.push_str(&format!("content_hash: {}\n", self.content_hash()));
        s
    }
}

fn invariants_csv_fields(inv: &ModuleInvariants) -> String {
    format!("{},{}", inv.free_rank, inv.torsion_string())
}

fn derham_table_csv(table: &derham::CohomologyTable) -> String {
    let mut csv = String::from("coh_degree,poly_degree,free_rank,invariant_factors,representative\n");
    for ((n, d), (inv, rep)) in table {
        csv.push_str(&format!(
            "{n},{d},{},{}\n",
            invariants_csv_fields(inv),
            rep.clone().unwrap_or_default()
        ));
    }
    csv
}

/// Dispatch a validated job. Slices run in parallel under the ambient
/// rayon pool; output assembly is single-threaded and ordered.
pub fn run_job(spec: &JobSpec) -> Result<Report> {
    let started = std::time::Instant::now();
    let mut report = Report::new(spec.command.as_str(), &spec.echo);
    match spec.command {
        JobCommand::Derham => run_derham(spec, &mut report)?,
        JobCommand::Envelope => run_envelope(spec, &mut report)?,
        JobCommand::Probe => run_probe(spec, &mut report)?,
        JobCommand::Crystalline => run_crystalline(spec, &mut report)?,
        JobCommand::CompareModp => run_compare_modp(spec, &mut report)?,
        JobCommand::Cech | JobCommand::CompareCech => run_cech(spec, &mut report)?,
    }
    report.wall_ms = started.elapsed().as_millis();
    Ok(report)
}

fn run_derham(spec: &JobSpec, report: &mut Report) -> Result<()> {
    let slices: Vec<Vec<((usize, u32), (ModuleInvariants, Option<String>))>> = (0..=spec
        .degree_cap)
        .into_par_iter()
        .map(|d| {
            let slice = derham::derham_slice(&spec.ring, spec.vars, d);
            (0..=spec.vars)
                .map(|n| {
                    let inv = slice.cohomology_at(n as i64).expect("degree in range");
                    let rep = if inv.is_zero() {
                        None
                    } else {
                        slice.representative_at(n as i64)
                    };
                    ((n, d), (inv, rep))
                })
                .collect()
        })
        .collect();
    let mut table = derham::CohomologyTable::new();
    for entries in slices {
        table.extend(entries);
    }
    report.add_table("derham_cohomology", derham_table_csv(&table));
    report.add_verdict("computed", true);
    Ok(())
}

fn run_envelope(spec: &JobSpec, report: &mut Report) -> Result<()> {
    let pres = RegularQuotientPresentation::new(
        &spec.ring,
        spec.vars,
        spec.gens.clone(),
        spec.mode,
        spec.weight_cap,
    )?;
    let env = EnvelopeAlgebra::build(pres, spec.degree_cap)?;
    let mut csv = String::from("weight,rank\n");
    for w in 0..spec.weight_cap {
        csv.push_str(&format!("{w},{}\n", env.graded_piece(w)?.rank()));
    }
    report.add_table("graded_ranks", csv);
    report.add_table("envelope_dump", env.dump());
    if spec.weight_cap >= 2 {
        let sz = env.square_zero_truncation(spec.degree_cap)?;
        let mut csv = String::from("item,value\n");
        csv.push_str(&format!("conormal_rank,{}\n", sz.conormal_rank));
        csv.push_str(&format!(
            "conormal_basis,{}\n",
            sz.conormal_basis.join(" ; ")
        ));
        csv.push_str(&format!(
            "extension_basis,{}\n",
            sz.extension_basis.join(" ; ")
        ));
        report.add_table("square_zero", csv);
    }
    report.add_verdict("regularity_probe", true);
    Ok(())
}

fn run_probe(spec: &JobSpec, report: &mut Report) -> Result<()> {
    let pres = RegularQuotientPresentation::new(
        &spec.ring,
        spec.vars,
        spec.gens.clone(),
        spec.mode,
        spec.weight_cap.max(2),
    )?;
    let probe = regularity_probe(&pres, spec.degree_cap)?;
    let mut csv = String::from("item,value\n");
    csv.push_str(&format!("pass,{}\n", probe.pass));
    if let Some(w) = &probe.witness {
        let rendered: Vec<String> = w.iter().map(|p| p.to_string()).collect();
        csv.push_str(&format!("witness,({})\n", rendered.join(", ")));
        csv.push_str(&format!(
            "failed_degree,{}\n",
            probe.failed_degree.unwrap_or(0)
        ));
    }
    report.add_table("regularity_probe", csv);
    report.add_verdict("regular_through_degree_bound", probe.pass);
    Ok(())
}

fn lift_spec_from_job(spec: &JobSpec) -> Result<LiftSpec> {
    let p = match spec.ring.char_p() {
        Some(p) => p.clone(),
        None => return Err(Error::ParseError("crystalline jobs need a prime p".into())),
    };
    LiftSpec::default_lift(p, spec.precision, spec.vars, spec.gens.clone(), spec.weight_cap)
}

fn run_crystalline(spec: &JobSpec, report: &mut Report) -> Result<()> {
    let lift = lift_spec_from_job(spec)?;
    match crystalline_via_lift(&lift, spec.degree_cap)? {
        CrystallineTable::Polynomial { entries } => {
            let mut csv = String::from(
                "coh_degree,poly_degree,free_rank,invariant_factors,representative\n",
            );
            for ((n, d), e) in &entries {
                csv.push_str(&format!(
                    "{n},{d},{},{}\n",
                    invariants_csv_fields(&e.truncated),
                    e.representative.clone().unwrap_or_default()
                ));
            }
            report.add_table("crystalline_cohomology", csv);
        }
        CrystallineTable::Quotient { rows } => {
            let mut csv = String::from("weight,rank\n");
            for r in &rows {
                csv.push_str(&format!("{},{}\n", r.weight, r.rank));
            }
            report.add_table("crystalline_graded", csv);
        }
    }
    report.add_verdict("computed", true);
    Ok(())
}

fn comparison_csv(rep: &ModpComparison) -> String {
    let mut csv = String::from("slice,side,n,dims,invariant_factors,verdict\n");
    for s in &rep.slices {
        let verdict = if s.pass { "pass" } else { "FAIL" };
        csv.push_str(&format!(
            "{},fp,{},{},{},{}\n",
            s.d,
            s.n,
            s.fp_side.free_rank,
            s.fp_side.torsion_string(),
            verdict
        ));
        csv.push_str(&format!(
            "{},crys,{},{},{},{}\n",
            s.d,
            s.n,
            s.crys_truncated.free_rank,
            s.crys_integral.torsion_string(),
            verdict
        ));
    }
    for s in &rep.structural {
        csv.push_str(&format!(
            "{},lift,,{},,{}\n",
            s.label,
            s.lift_side,
            if s.pass { "pass" } else { "FAIL" }
        ));
        csv.push_str(&format!(
            "{},target,,{},,{}\n",
            s.label,
            s.target_side,
            if s.pass { "pass" } else { "FAIL" }
        ));
    }
    csv
}

fn run_compare_modp(spec: &JobSpec, report: &mut Report) -> Result<()> {
    let lift = lift_spec_from_job(spec)?;
    let rep = mod_p_comparison(&lift, spec.degree_cap)?;
    report.add_table("mod_p_comparison", comparison_csv(&rep));
    report.add_verdict("mod_p_comparison", rep.pass);
    Ok(())
}

fn run_cech(spec: &JobSpec, report: &mut Report) -> Result<()> {
    let complex = cech::build_cech(&spec.ring, spec.vars, spec.cosimplicial_cap, spec.weight_cap)?;
    let max_weight = spec
        .weight_cap
        .saturating_sub(1)
        .min(spec.cosimplicial_cap as u32 - 1);
    type WeightTable =
        std::collections::BTreeMap<(i64, u32), (ModuleInvariants, Option<String>)>;
    let tables: Vec<(u32, WeightTable)> = (0..=max_weight)
        .into_par_iter()
        .map(|n| {
            let t = cech::totalize_weight_with_reps(&complex, n, spec.degree_cap)
                .expect("caps validated before dispatch");
            (n, t)
        })
        .collect();
    // same format as the De Rham tables, plus the cosimplicial cap column
    for (n, table) in &tables {
        let mut csv = String::from(
            "coh_degree,poly_degree,free_rank,invariant_factors,representative,cosimplicial_cap\n",
        );
        for ((deg, d), (inv, rep)) in table {
            csv.push_str(&format!(
                "{deg},{d},{},{},{}\n",
                invariants_csv_fields(inv),
                rep.clone().unwrap_or_default(),
                spec.cosimplicial_cap
            ));
        }
        report.add_table(&format!("cech_totalization_weight_{n}"), csv);
    }

    if spec.command == JobCommand::CompareCech {
        let (rows, pass) = cech::cech_compare(
            &spec.ring,
            spec.vars,
            spec.cosimplicial_cap,
            spec.weight_cap,
            spec.degree_cap,
        )?;
        let mut csv = String::from(
            "weight,poly_degree,coh_degree,free_rank,invariant_factors,expected_rank,verdict\n",
        );
        for r in &rows {
            csv.push_str(&format!(
                "{},{},{},{},{},{}\n",
                r.weight,
                r.slice,
                r.degree,
                invariants_csv_fields(&r.invariants),
                r.expected_rank,
                if r.pass { "pass" } else { "FAIL" }
            ));
        }
        report.add_table("cech_vs_exterior_model", csv);
        report.add_verdict("cech_comparison", pass);
    } else {
        report.add_verdict("computed", true);
    }
    Ok(())
}

/// Exit code semantics shared by the CLI: 0 success, 1 comparison failure,
/// 2 input error.
pub fn exit_code_for(outcome: &Result<Report>) -> i32 {
    match outcome {
        Ok(r) if r.passed() => 0,
        Ok(_) => 1,
        Err(Error::ComparisonFailed(_)) => 1,
        Err(_) => 2,
    }
}
