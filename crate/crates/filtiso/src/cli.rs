//! Library half of the command-line tool: a `JobSpec` describes one batch
//! job, `run` executes it and returns the rendered output plus an exit code.
//! The binary in main.rs only parses argv into a `JobSpec`.
//!
//! Exit codes: 0 success or mathematical positive; 1 mathematical negative
//! carrying a certificate (inadmissible, not in the stratum, sweep anomaly,
//! failed example check); 2 undecided; 3 parse error; 4 validation error;
//! 5 internal error.

use crate::adjoint::DominantCoweight;
use crate::error::{Error, Result};
use crate::filtered::{FilteredIsocrystal, Flag, WaStatus};
use crate::filtype::FiltrationType;
use crate::linalg::Subspace;
use crate::schema::{
    self, AdjointOutput, CaseOutput, CheckOutput, ExamplesOutput, FrobeniusBody, HnOutput,
    MuOutput, NewtonOutput, ObjectBody, PointBody, SlopeOutput, StratumOutput, StratumQuery,
    SweepRecordOutput, SweepSummaryOutput, TypeBody, WaOutput,
};
use crate::theorem::{self, sampling, SweepConfig};
use std::fmt::Write as _;
use std::io::Read as _;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    MuOfNu,
    Stratum,
    NewtonPolygon,
    CheckWa,
    Hn,
    SlopeDecomp,
    AdjointImage,
    VerifyTheorem,
    Examples,
}

#[derive(Clone, Debug)]
pub struct SweepParams {
    pub p: u64,
    pub d: usize,
    pub e: u32,
    pub f: u32,
    /// Run the whole acceptance grid (d in {2,3} x (e,f) in {(1,1),(2,1),(1,2)})
    /// instead of the single configuration above.
    pub grid: bool,
}

impl Default for SweepParams {
    fn default() -> SweepParams {
        SweepParams {
            p: 5,
            d: 2,
            e: 1,
            f: 1,
            grid: false,
        }
    }
}

#[derive(Clone, Debug)]
pub struct JobSpec {
    pub command: Command,
    /// Path to a JSON document, inline JSON (starts with '{'), or "-" for stdin.
    pub input: Option<String>,
    pub json: bool,
    pub seed: u64,
    pub budget: u32,
    /// Stratum membership against the closed stratum (default) or the open one.
    pub closed: bool,
    pub sweep: SweepParams,
}

impl JobSpec {
    pub fn new(command: Command) -> JobSpec {
        JobSpec {
            command,
            input: None,
            json: false,
            seed: 0,
            budget: 64,
            closed: true,
            sweep: SweepParams::default(),
        }
    }
}

#[derive(Clone, Debug)]
pub struct RunOutcome {
    pub exit: i32,
    pub stdout: String,
    pub stderr: String,
}

pub fn run(job: &JobSpec) -> RunOutcome {
    match dispatch(job) {
        Ok(outcome) => outcome,
        Err(e) => RunOutcome {
            exit: exit_for_error(&e),
            stdout: String::new(),
            stderr: format!("error: {e}\n"),
        },
    }
}

fn exit_for_error(e: &Error) -> i32 {
    match e {
        Error::Parse(_) => 3,
        Error::Validation(_)
        | Error::FieldMismatch(_)
        | Error::IncompatibleTower { .. }
        | Error::DimensionMismatch(_)
        | Error::MalformedPoint(_)
        | Error::InfiniteConstantTerm
        | Error::NonDominant(_)
        | Error::IndexOutOfRange { .. }
        | Error::NotStable
        | Error::UnsupportedFrobenius(_)
        | Error::NotIntertwining
        | Error::NotMorphism
        | Error::NotNested
        | Error::ZeroSubspace => 4,
        _ => 5,
    }
}

fn dispatch(job: &JobSpec) -> Result<RunOutcome> {
    match job.command {
        Command::MuOfNu => run_mu_of_nu(job),
        Command::Stratum => run_stratum(job),
        Command::NewtonPolygon => run_newton_polygon(job),
        Command::CheckWa => run_check_wa(job),
        Command::Hn => run_hn(job),
        Command::SlopeDecomp => run_slope_decomp(job),
        Command::AdjointImage => run_adjoint_image(job),
        Command::VerifyTheorem => run_verify_theorem(job),
        Command::Examples => run_examples(job),
    }
}

fn load_input(job: &JobSpec) -> Result<String> {
    let Some(spec) = &job.input else {
        return Err(Error::Validation("this command requires --input".into()));
    };
    if spec == "-" {
        let mut text = String::new();
        std::io::stdin()
            .read_to_string(&mut text)
            .map_err(|e| Error::Parse(format!("cannot read standard input: {e}")))?;
        Ok(text)
    } else if spec.trim_start().starts_with('{') {
        Ok(spec.clone())
    } else {
        std::fs::read_to_string(spec).map_err(|e| Error::Parse(format!("cannot read {spec}: {e}")))
    }
}

fn tuple(ss: &[String]) -> String {
    format!("({})", ss.join(", "))
}

fn final_jump_warnings(ftype: &FiltrationType) -> Vec<String> {
    if ftype.has_nonzero_final_jump() {
        vec![
            "an embedding has nonzero final jump; generic degrees grow by the final \
             jump times the subspace rank, not times the full rank"
                .to_string(),
        ]
    } else {
        Vec::new()
    }
}

fn run_mu_of_nu(job: &JobSpec) -> Result<RunOutcome> {
    let body: TypeBody = schema::parse_document(&load_input(job)?)?;
    let ftype = body.to_type()?;
    let out = MuOutput {
        coweight: schema::rationals_to_strings(ftype.stratum_coweight().entries()),
        generic_degrees: schema::rationals_to_strings(&ftype.generic_degrees()),
        thresholds: schema::rationals_to_strings(&ftype.stratum_thresholds()),
        warnings: final_jump_warnings(&ftype),
    };
    let stdout = if job.json {
        schema::emit_document(&out)
    } else {
        format!(
            "coweight: {}\ngeneric degrees: {}\nthresholds: {}\n",
            tuple(&out.coweight),
            tuple(&out.generic_degrees),
            tuple(&out.thresholds)
        )
    };
    Ok(RunOutcome {
        exit: 0,
        stdout,
        stderr: warnings_to_stderr(&out.warnings),
    })
}

fn warnings_to_stderr(warnings: &[String]) -> String {
    warnings
        .iter()
        .map(|w| format!("warning: {w}\n"))
        .collect()
}

fn run_stratum(job: &JobSpec) -> Result<RunOutcome> {
    let query: StratumQuery = schema::parse_document(&load_input(job)?)?;
    let point = schema::point_from_strings(&query.point)?;
    let (coweight, warnings) = match (&query.filtration_type, &query.coweight) {
        (Some(body), None) => {
            let ftype = body.to_type()?;
            (ftype.stratum_coweight(), final_jump_warnings(&ftype))
        }
        (None, Some(entries)) => (
            DominantCoweight::new(schema::rationals_from_strings(entries)?)?,
            Vec::new(),
        ),
        _ => {
            return Err(Error::Validation(
                "provide exactly one of filtration_type and coweight".into(),
            ));
        }
    };
    let member = point.in_stratum(&coweight, job.closed)?;
    let out = StratumOutput {
        point: schema::point_to_strings(&point),
        coweight: schema::rationals_to_strings(coweight.entries()),
        closed: job.closed,
        member,
        retraction: schema::rationals_to_strings(point.newton_retraction().entries()),
    };
    let stdout = if job.json {
        schema::emit_document(&out)
    } else {
        format!(
            "point {} retracts to {}\nmember of the {} stratum of {}: {}\n",
            tuple(&out.point),
            tuple(&out.retraction),
            if job.closed { "closed" } else { "open" },
            tuple(&out.coweight),
            if member { "yes" } else { "no" }
        )
    };
    Ok(RunOutcome {
        exit: if member { 0 } else { 1 },
        stdout,
        stderr: warnings_to_stderr(&warnings),
    })
}

fn run_newton_polygon(job: &JobSpec) -> Result<RunOutcome> {
    let body: PointBody = schema::parse_document(&load_input(job)?)?;
    let point = body.to_point()?;
    let out = NewtonOutput {
        point: schema::point_to_strings(&point),
        retraction: schema::rationals_to_strings(point.newton_retraction().entries()),
    };
    let stdout = if job.json {
        schema::emit_document(&out)
    } else {
        format!("retraction: {}\n", tuple(&out.retraction))
    };
    Ok(RunOutcome {
        exit: 0,
        stdout,
        stderr: String::new(),
    })
}

fn run_check_wa(job: &JobSpec) -> Result<RunOutcome> {
    let body: ObjectBody = schema::parse_document(&load_input(job)?)?;
    let obj = body.to_object()?;
    let verdict = obj.weak_admissibility();
    let warnings = final_jump_warnings(obj.filtration_type());
    let out = WaOutput::from_verdict(&verdict, warnings.clone());
    let stdout = if job.json {
        schema::emit_document(&out)
    } else {
        let mut text = format!("status: {}\n", out.status);
        if let Some(c) = &out.certificate {
            let _ = writeln!(
                text,
                "certificate: {} with degree {} against newton number {}",
                c.kind, c.degree, c.newton_number
            );
            if let Some(dims) = &c.piece_dims {
                let _ = writeln!(text, "  piece dims {dims:?}");
            }
        }
        for row in &out.detail {
            let bound = row.degree_bound.as_deref().unwrap_or("-");
            let _ = writeln!(
                text,
                "  dims {:?} rank {} degree {} {} newton {}",
                row.piece_dims,
                row.rank,
                bound,
                if row.exact { "exact" } else { "bound" },
                row.newton_number
            );
        }
        for dims in &out.undecided {
            let _ = writeln!(text, "  undecided family {dims:?}");
        }
        text
    };
    let exit = match verdict.status {
        WaStatus::Admissible => 0,
        WaStatus::Inadmissible => 1,
        WaStatus::Undecided => 2,
    };
    Ok(RunOutcome {
        exit,
        stdout,
        stderr: warnings_to_stderr(&warnings),
    })
}

fn run_hn(job: &JobSpec) -> Result<RunOutcome> {
    let body: ObjectBody = schema::parse_document(&load_input(job)?)?;
    let obj = body.to_object()?;
    let steps = obj.harder_narasimhan()?;
    let out = HnOutput::from_steps(&steps);
    let stdout = if job.json {
        schema::emit_document(&out)
    } else {
        let mut text = String::new();
        for (i, s) in out.steps.iter().enumerate() {
            let _ = writeln!(
                text,
                "step {}: rank {} slope {} degree {} newton {}",
                i + 1,
                s.rank,
                s.slope,
                s.degree,
                s.newton_number
            );
        }
        let _ = writeln!(
            text,
            "semistable: {}",
            if out.semistable { "yes" } else { "no" }
        );
        text
    };
    Ok(RunOutcome {
        exit: 0,
        stdout,
        stderr: String::new(),
    })
}

fn run_slope_decomp(job: &JobSpec) -> Result<RunOutcome> {
    let body: FrobeniusBody = schema::parse_document(&load_input(job)?)?;
    let spec = body.to_spec()?;
    let out = SlopeOutput::from_pieces(&spec.slope_decomposition());
    let stdout = if job.json {
        schema::emit_document(&out)
    } else {
        let mut text = String::new();
        for p in &out.pieces {
            let _ = writeln!(text, "slope {}: dim {}", p.slope, p.dim);
        }
        text
    };
    Ok(RunOutcome {
        exit: 0,
        stdout,
        stderr: String::new(),
    })
}

fn run_adjoint_image(job: &JobSpec) -> Result<RunOutcome> {
    let body: FrobeniusBody = schema::parse_document(&load_input(job)?)?;
    let spec = body.to_spec()?;
    let point = theorem::adjoint_image(&spec);
    let out = AdjointOutput {
        point: schema::point_to_strings(&point),
        retraction: schema::rationals_to_strings(point.newton_retraction().entries()),
    };
    let stdout = if job.json {
        schema::emit_document(&out)
    } else {
        format!(
            "point: {}\nretraction: {}\n",
            tuple(&out.point),
            tuple(&out.retraction)
        )
    };
    Ok(RunOutcome {
        exit: 0,
        stdout,
        stderr: String::new(),
    })
}

/// The six acceptance configurations.
pub fn acceptance_grid(p: u64) -> Vec<SweepConfig> {
    let mut configs = Vec::new();
    for d in [2usize, 3] {
        for (e, f) in [(1u32, 1u32), (2, 1), (1, 2)] {
            configs.push(SweepConfig::new(p, d, e, f));
        }
    }
    configs
}

fn run_verify_theorem(job: &JobSpec) -> Result<RunOutcome> {
    let mut configs = if job.sweep.grid {
        acceptance_grid(job.sweep.p)
    } else {
        vec![SweepConfig::new(
            job.sweep.p,
            job.sweep.d,
            job.sweep.e,
            job.sweep.f,
        )]
    };
    for cfg in &mut configs {
        cfg.seed = job.seed;
        cfg.budget = job.budget;
    }
    let mut stdout = String::new();
    let mut total_anomalies = 0usize;
    let mut json_summaries = Vec::new();
    for cfg in &configs {
        let summary = theorem::theorem_sweep(cfg);
        total_anomalies += summary.anomalies;
        if job.json {
            json_summaries.push(SweepSummaryOutput::from_summary(&summary));
        } else {
            let _ = writeln!(
                stdout,
                "d={} e={} f={}: cells {:>4}  predicted true {:>4}  false {:>4}  anomalies {}",
                cfg.d, cfg.e, cfg.f, summary.total, summary.predicted_true,
                summary.predicted_false, summary.anomalies
            );
            for r in summary.records.iter().filter(|r| r.is_anomaly()) {
                let rec = SweepRecordOutput::from_record(r);
                let _ = writeln!(
                    stdout,
                    "  anomaly at {}: {}",
                    rec.cell,
                    rec.anomaly.as_deref().unwrap_or("?")
                );
            }
        }
    }
    if job.json {
        for s in &json_summaries {
            stdout.push_str(&schema::emit_document(s));
            stdout.push('\n');
        }
    } else {
        let _ = writeln!(stdout, "total anomalies: {total_anomalies}");
    }
    Ok(RunOutcome {
        exit: if total_anomalies == 0 { 0 } else { 1 },
        stdout,
        stderr: String::new(),
    })
}

fn coord_line(field: crate::field::FieldSpec, n: usize, i: usize) -> Subspace {
    let v: Vec<_> = (0..n)
        .map(|j| if j == i { field.one() } else { field.zero() })
        .collect();
    Subspace::from_vectors(field, vec![v]).expect("unit vector")
}

fn flag_from_spans(steps: Vec<(i64, Subspace)>) -> Flag {
    Flag::new(steps).expect("scripted flags are valid")
}

fn run_examples(job: &JobSpec) -> Result<RunOutcome> {
    let p = job.sweep.p;
    let mut cases = Vec::new();

    // split rank 3: two scripted flags, the two single-condition violations,
    // and seeded agreement with the two-condition predicate
    {
        let case = theorem::reference_split_rank3(p);
        let field = case.frobenius.field();
        let mut checks = Vec::new();
        let e = |i| coord_line(field, 3, i);
        let full = Subspace::full(field, 3);
        let standard = flag_from_spans(vec![
            (2, e(0)),
            (1, e(0).sum(&e(1))),
            (0, full.clone()),
        ]);
        let obj = FilteredIsocrystal::new(
            case.frobenius.clone(),
            case.ftype.clone(),
            vec![standard],
        )?;
        checks.push(check(
            "standard flag is inadmissible",
            obj.weak_admissibility().status == WaStatus::Inadmissible,
        ));

        let line = Subspace::from_vectors(
            field,
            vec![vec![field.one(), field.one(), field.one()]],
        )?;
        let generic = flag_from_spans(vec![
            (2, line.clone()),
            (1, line.sum(&e(1))),
            (0, full.clone()),
        ]);
        let obj = FilteredIsocrystal::new(
            case.frobenius.clone(),
            case.ftype.clone(),
            vec![generic],
        )?;
        checks.push(check(
            "generic flag is admissible",
            obj.weak_admissibility().status == WaStatus::Admissible,
        ));

        let first_only = flag_from_spans(vec![
            (2, e(2)),
            (1, e(0).sum(&e(2))),
            (0, full.clone()),
        ]);
        let second_only = flag_from_spans(vec![
            (2, e(1)),
            (1, e(1).sum(&e(2))),
            (0, full.clone()),
        ]);
        let mut single_violations_caught = true;
        for flag in [first_only, second_only] {
            let obj = FilteredIsocrystal::new(
                case.frobenius.clone(),
                case.ftype.clone(),
                vec![flag],
            )?;
            single_violations_caught &=
                obj.weak_admissibility().status == WaStatus::Inadmissible;
        }
        checks.push(check(
            "each condition is caught separately",
            single_violations_caught,
        ));

        let mut rng = sampling::seeded(job.seed.wrapping_add(1));
        let mut agree = true;
        for _ in 0..30 {
            let flags = sampling::random_flags(field, &case.ftype, &mut rng);
            let obj =
                FilteredIsocrystal::new(case.frobenius.clone(), case.ftype.clone(), flags)?;
            let verdict = obj.weak_admissibility().status;
            agree &= verdict != WaStatus::Undecided
                && theorem::split_rank3_predicate(&obj) == (verdict == WaStatus::Admissible);
        }
        checks.push(check("verdicts match the two-condition predicate", agree));
        cases.push(case_output(case.name, checks));
    }

    // repeated slope: every flag inadmissible, certified by a line in the
    // slope-0 eigenplane part of F^1
    {
        let case = theorem::reference_repeated_rank3(p);
        let field = case.frobenius.field();
        let mut rng = sampling::seeded(job.seed.wrapping_add(2));
        let mut all_inadmissible = true;
        let mut lines_contained = true;
        for _ in 0..20 {
            let flags = sampling::random_flags(field, &case.ftype, &mut rng);
            let obj =
                FilteredIsocrystal::new(case.frobenius.clone(), case.ftype.clone(), flags)?;
            let verdict = obj.weak_admissibility();
            all_inadmissible &= verdict.status == WaStatus::Inadmissible;
            match &verdict.certificate {
                Some(crate::filtered::WaCertificate::ViolatingSubspace {
                    subspace, ..
                }) => {
                    let locus = theorem::repeated_rank3_meeting_locus(&obj);
                    lines_contained &=
                        subspace.rank() == 1 && locus.contains(subspace.space());
                }
                _ => lines_contained = false,
            }
        }
        let mut checks = vec![check("every sampled flag is inadmissible", all_inadmissible)];
        checks.push(check(
            "certificates are lines inside the meeting locus",
            lines_contained,
        ));
        cases.push(case_output(case.name, checks));
    }

    // ramified rank 2: the four boundary patterns and seeded agreement with
    // the eigenline predicate
    {
        let case = theorem::reference_ramified_rank2(p);
        let field = case.frobenius.field();
        let e = |i| coord_line(field, 2, i);
        let full = Subspace::full(field, 2);
        let mut boundary_ok = true;
        for (a, b) in [(0, 0), (0, 1), (1, 0), (1, 1)] {
            let flags = vec![
                flag_from_spans(vec![(1, e(a)), (0, full.clone())]),
                flag_from_spans(vec![(1, e(b)), (0, full.clone())]),
            ];
            let obj =
                FilteredIsocrystal::new(case.frobenius.clone(), case.ftype.clone(), flags)?;
            let expect = a == 1 && b == 1; // admissible iff neither line is the eigenline
            boundary_ok &=
                (obj.weak_admissibility().status == WaStatus::Admissible) == expect;
        }
        let mut checks = vec![check("all four boundary patterns", boundary_ok)];
        let mut rng = sampling::seeded(job.seed.wrapping_add(3));
        let mut agree = true;
        for _ in 0..20 {
            let flags = sampling::random_flags(field, &case.ftype, &mut rng);
            let obj =
                FilteredIsocrystal::new(case.frobenius.clone(), case.ftype.clone(), flags)?;
            let verdict = obj.weak_admissibility().status;
            agree &= verdict != WaStatus::Undecided
                && theorem::ramified_rank2_predicate(&obj)
                    == (verdict == WaStatus::Admissible);
        }
        checks.push(check("verdicts match the eigenline predicate", agree));
        cases.push(case_output(case.name, checks));
    }

    let pass = cases.iter().all(|c| c.pass);
    let out = ExamplesOutput { cases, pass };
    let stdout = if job.json {
        schema::emit_document(&out)
    } else {
        let mut text = String::new();
        for case in &out.cases {
            let _ = writeln!(text, "{}:", case.name);
            for c in &case.checks {
                let _ = writeln!(text, "  {} {}", if c.pass { "PASS" } else { "FAIL" }, c.name);
            }
        }
        let _ = writeln!(text, "{}", if out.pass { "all checks passed" } else { "some checks failed" });
        text
    };
    Ok(RunOutcome {
        exit: if out.pass { 0 } else { 1 },
        stdout,
        stderr: String::new(),
    })
}

fn check(name: &str, pass: bool) -> CheckOutput {
    CheckOutput {
        name: name.to_string(),
        pass,
        note: None,
    }
}

fn case_output(name: &str, checks: Vec<CheckOutput>) -> CaseOutput {
    let pass = checks.iter().all(|c| c.pass);
    CaseOutput {
        name: name.to_string(),
        checks,
        pass,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn type_doc() -> String {
        schema::emit_document(&TypeBody {
            d: 3,
            e: 1,
            f: 1,
            embeddings: vec![vec![(2, 1), (1, 2), (0, 3)]],
        })
    }

    #[test]
    fn mu_of_nu_prints_the_thresholds() {
        let mut job = JobSpec::new(Command::MuOfNu);
        job.input = Some(type_doc());
        let out = run(&job);
        assert_eq!(out.exit, 0);
        assert!(out.stdout.contains("thresholds: (0, 1, 3)"));
        assert!(out.stderr.is_empty());

        job.json = true;
        let out = run(&job);
        let parsed: MuOutput = schema::parse_document(&out.stdout).unwrap();
        assert_eq!(parsed.coweight, vec!["0", "-1", "-2"]);
        assert_eq!(parsed.generic_degrees, vec!["0", "1", "3"]);
    }

    #[test]
    fn mu_of_nu_warns_on_nonzero_final_jump() {
        let mut job = JobSpec::new(Command::MuOfNu);
        job.input = Some(schema::emit_document(&TypeBody {
            d: 2,
            e: 1,
            f: 1,
            embeddings: vec![vec![(2, 1), (1, 2)]],
        }));
        job.json = true;
        let out = run(&job);
        assert_eq!(out.exit, 0);
        assert!(out.stderr.contains("warning: an embedding has nonzero final jump"));
        let parsed: MuOutput = schema::parse_document(&out.stdout).unwrap();
        assert_eq!(parsed.warnings.len(), 1);
    }

    #[test]
    fn stratum_membership_drives_the_exit_code() {
        let mut job = JobSpec::new(Command::Stratum);
        let doc = |vals: &[&str]| {
            schema::emit_document(&StratumQuery {
                point: vals.iter().map(|s| s.to_string()).collect(),
                filtration_type: Some(TypeBody {
                    d: 3,
                    e: 1,
                    f: 1,
                    embeddings: vec![vec![(2, 1), (1, 2), (0, 3)]],
                }),
                coweight: None,
            })
        };
        job.input = Some(doc(&["0", "1", "3"]));
        let out = run(&job);
        assert_eq!(out.exit, 0, "boundary point is a member: {}", out.stdout);

        job.input = Some(doc(&["-1", "1", "3"]));
        let out = run(&job);
        assert_eq!(out.exit, 1);
        assert!(out.stdout.contains("no"));

        // open stratum excludes the boundary of the smaller cell
        job.input = Some(doc(&["1", "2", "3"]));
        job.closed = false;
        let out = run(&job);
        assert_eq!(out.exit, 1, "{}", out.stdout);
    }

    #[test]
    fn newton_polygon_retracts_a_point() {
        let mut job = JobSpec::new(Command::NewtonPolygon);
        job.input = Some(schema::emit_document(&PointBody {
            vals: vec!["2".into(), "2".into()],
        }));
        let out = run(&job);
        assert_eq!(out.exit, 0);
        assert!(out.stdout.contains("retraction: (-1, -1)"));
    }

    #[test]
    fn check_wa_exit_codes_follow_the_verdict() {
        let case = theorem::reference_split_rank3(5);
        let field = case.frobenius.field();
        let e = |i| coord_line(field, 3, i);
        let full = Subspace::full(field, 3);
        let standard = flag_from_spans(vec![(2, e(0)), (1, e(0).sum(&e(1))), (0, full.clone())]);
        let obj = FilteredIsocrystal::new(
            case.frobenius.clone(),
            case.ftype.clone(),
            vec![standard],
        )
        .unwrap();
        let mut job = JobSpec::new(Command::CheckWa);
        job.input = Some(schema::emit_document(&ObjectBody::from_object(&obj)));
        job.json = true;
        let out = run(&job);
        assert_eq!(out.exit, 1);
        let parsed: WaOutput = schema::parse_document(&out.stdout).unwrap();
        assert_eq!(parsed.status, "inadmissible");
        assert!(parsed.certificate.is_some());

        let line =
            Subspace::from_vectors(field, vec![vec![field.one(), field.one(), field.one()]])
                .unwrap();
        let generic = flag_from_spans(vec![(2, line.clone()), (1, line.sum(&e(1))), (0, full)]);
        let obj =
            FilteredIsocrystal::new(case.frobenius.clone(), case.ftype.clone(), vec![generic])
                .unwrap();
        job.input = Some(schema::emit_document(&ObjectBody::from_object(&obj)));
        let out = run(&job);
        assert_eq!(out.exit, 0, "{}", out.stderr);
        let parsed: WaOutput = schema::parse_document(&out.stdout).unwrap();
        assert_eq!(parsed.status, "admissible");
        assert!(!parsed.detail.is_empty());
    }

    #[test]
    fn hn_reports_the_slope_sequence() {
        let case = theorem::reference_split_rank3(5);
        let field = case.frobenius.field();
        let e = |i| coord_line(field, 3, i);
        let full = Subspace::full(field, 3);
        let standard = flag_from_spans(vec![(2, e(0)), (1, e(0).sum(&e(1))), (0, full)]);
        let obj =
            FilteredIsocrystal::new(case.frobenius, case.ftype, vec![standard]).unwrap();
        let mut job = JobSpec::new(Command::Hn);
        job.input = Some(schema::emit_document(&ObjectBody::from_object(&obj)));
        let out = run(&job);
        assert_eq!(out.exit, 0);
        assert!(out.stdout.contains("slope 2"));
        assert!(out.stdout.contains("semistable: no"));
    }

    #[test]
    fn slope_decomp_and_adjoint_image_read_a_frobenius() {
        let case = theorem::reference_split_rank3(5);
        let doc = schema::emit_document(&FrobeniusBody::from_spec(&case.frobenius));
        let mut job = JobSpec::new(Command::SlopeDecomp);
        job.input = Some(doc.clone());
        let out = run(&job);
        assert_eq!(out.exit, 0);
        assert!(out.stdout.contains("slope 0: dim 1"));
        assert!(out.stdout.contains("slope 2: dim 1"));

        let mut job = JobSpec::new(Command::AdjointImage);
        job.input = Some(doc);
        job.json = true;
        let out = run(&job);
        assert_eq!(out.exit, 0);
        let parsed: AdjointOutput = schema::parse_document(&out.stdout).unwrap();
        assert_eq!(parsed.point, vec!["0", "1", "3"]);
        assert_eq!(parsed.retraction, vec!["0", "-1", "-2"]);
    }

    #[test]
    fn malformed_and_invalid_inputs_use_distinct_exit_codes() {
        let mut job = JobSpec::new(Command::MuOfNu);
        job.input = Some("{ not json".into());
        assert_eq!(run(&job).exit, 3);

        // well-formed JSON violating a type invariant: ranks not increasing
        job.input = Some(
            r#"{"schema": 1, "d": 2, "e": 1, "f": 1, "embeddings": [[[1, 2], [0, 2]]]}"#.into(),
        );
        assert_eq!(run(&job).exit, 4);

        job.input = None;
        assert_eq!(run(&job).exit, 4);
    }

    #[test]
    fn examples_command_passes_and_reports_every_case() {
        let mut job = JobSpec::new(Command::Examples);
        job.json = true;
        let out = run(&job);
        assert_eq!(out.exit, 0, "{}", out.stdout);
        let parsed: ExamplesOutput = schema::parse_document(&out.stdout).unwrap();
        assert!(parsed.pass);
        assert_eq!(parsed.cases.len(), 3);
        assert!(parsed.cases.iter().all(|c| c.pass && !c.checks.is_empty()));
    }

    #[test]
    fn verify_theorem_single_config_is_clean() {
        let mut job = JobSpec::new(Command::VerifyTheorem);
        job.budget = 32;
        job.sweep.d = 2;
        let out = run(&job);
        assert_eq!(out.exit, 0, "{}", out.stdout);
        assert!(out.stdout.contains("total anomalies: 0"));
    }
}
