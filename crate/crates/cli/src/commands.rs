//! Subcommand handlers, generic over the coefficient ring.

use std::sync::Arc;

use dglift::algebra::{koszul_algebra, tensor_with_koszul, BlockAlgebra, DgAlgebra};
use dglift::ext::{ext_is_zero, homothety_check, ExtStatus, HomothetyStatus};
use dglift::hom::GradedMap;
use dglift::iterated::{lift_iterated, IteratedError};
use dglift::json::{parse_vector, vector_to_json, MapSpec, ModuleSpec};
use dglift::lifting::{
    connecting_iso, lift, uniqueness_iso, verify_lift, verify_quasilift, LiftError, LiftOptions, LiftResult,
    StageRecord,
};
use dglift::module::{BlockModule, DgModule, SemiFreeModule};
use dglift::par::Execution;
use dglift::resolution::{semi_free_resolution, semi_free_resolution_block, verify_quasi_isomorphism};
use dglift::ring::{BaseField, PrimeField, PrimePowerIntegers, Rationals, RingSpec, TruncatedPoly, TruncatedRing};
use serde_json::{json, Value};

use crate::error::CliError;
use crate::problem::Problem;
use crate::report::{
    combination, describe_block, describe_semifree, homology_group, homology_json, Report, EXIT_INCONCLUSIVE,
    EXIT_OBSTRUCTED, EXIT_OK,
};
use crate::Options;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Check,
    Homology,
    Ext,
    Lift,
    LiftIterated,
    Unique,
    Semidualizing,
    Resolve,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Check => "check",
            Command::Homology => "homology",
            Command::Ext => "ext",
            Command::Lift => "lift",
            Command::LiftIterated => "lift-iterated",
            Command::Unique => "unique",
            Command::Semidualizing => "semidualizing",
            Command::Resolve => "resolve",
        }
    }
}

pub fn dispatch(command: Command, spec: RingSpec, problem: &Problem, opts: &Options) -> Result<Report, CliError> {
    match spec {
        RingSpec::Truncated {
            field: BaseField::Prime(p),
            precision,
        } => run(
            &TruncatedPoly::new(PrimeField::new(p)?, precision)?,
            command,
            spec,
            problem,
            opts,
        ),
        RingSpec::Truncated {
            field: BaseField::Rational,
            precision,
        } => run(&TruncatedPoly::new(Rationals, precision)?, command, spec, problem, opts),
        RingSpec::PrimePower { p, precision } => {
            run(&PrimePowerIntegers::new(p, precision)?, command, spec, problem, opts)
        }
    }
}

struct Context<'a, R: TruncatedRing> {
    ring: R,
    base: Arc<DgAlgebra<R>>,
    elements: Vec<R::Elem>,
    block: Option<Arc<BlockAlgebra<R>>>,
    window: Option<(i64, i64)>,
    exec: Execution,
    problem: &'a Problem,
    opts: &'a Options,
}

impl<R: TruncatedRing> Context<'_, R> {
    fn working(&self) -> &Arc<DgAlgebra<R>> {
        match &self.block {
            Some(b) => b.total(),
            None => &self.base,
        }
    }

    fn base_name(&self) -> String {
        if self.elements.is_empty() {
            "R".into()
        } else {
            let names: Vec<String> = self.elements.iter().map(|x| self.ring.format(x)).collect();
            format!("K({})", names.join(", "))
        }
    }

    fn working_name(&self) -> String {
        match &self.block {
            Some(b) => format!("K({}) ⊗ {}", self.ring.format(b.t()), self.base_name()),
            None => self.base_name(),
        }
    }

    fn module(&self, spec: &ModuleSpec) -> Result<DgModule<R>, CliError> {
        Ok(spec.to_dg_module(self.working(), self.block.as_ref())?)
    }

    fn block(&self) -> Result<&Arc<BlockAlgebra<R>>, CliError> {
        self.block
            .as_ref()
            .ok_or_else(|| CliError::Input("this command needs \"lift_along\"".into()))
    }

    fn seed(&self) -> Option<u64> {
        self.opts.seed.or(self.problem.seed)
    }

    fn lift_options(&self, perturb: Option<u64>) -> LiftOptions {
        LiftOptions {
            exec: self.exec,
            perturb,
        }
    }

    fn map_json(&self, f: &GradedMap<R>) -> Value {
        serde_json::to_value(MapSpec::from_map(&self.ring, f)).expect("maps serialize")
    }
}

fn spec_json(spec: &ModuleSpec) -> Value {
    serde_json::to_value(spec).expect("modules serialize")
}

fn transcript_json(records: &[StageRecord]) -> Value {
    serde_json::to_value(records).expect("records serialize")
}

fn transcript_lines(records: &[StageRecord], variable: Option<usize>) -> String {
    records
        .iter()
        .map(|r| {
            let mut v = serde_json::to_value(r).expect("records serialize");
            if let (Some(k), Value::Object(map)) = (variable, &mut v) {
                map.insert("variable".into(), k.into());
            }
            v.to_string() + "\n"
        })
        .collect()
}

fn run<R: TruncatedRing>(
    ring: &R,
    command: Command,
    spec: RingSpec,
    problem: &Problem,
    opts: &Options,
) -> Result<Report, CliError> {
    let elements: Vec<R::Elem> = match &problem.algebra {
        Some(a) => a
            .koszul
            .iter()
            .map(|x| ring.elem_from_json(x))
            .collect::<Result<_, _>>()?,
        None => vec![],
    };
    let base = Arc::new(if elements.is_empty() {
        DgAlgebra::ground(ring)
    } else {
        koszul_algebra(ring, &elements)?
    });
    let block = match &problem.lift_along {
        Some(t) => Some(Arc::new(tensor_with_koszul(base.clone(), ring.elem_from_json(t)?)?)),
        None => None,
    };
    let ctx = Context {
        ring: ring.clone(),
        base,
        elements,
        block,
        window: opts.window.or(problem.window),
        exec: if opts.sequential {
            Execution::Sequential
        } else {
            Execution::default()
        },
        problem,
        opts,
    };
    let mut report = Report::new(command.name(), spec.to_string());
    if let Some((lo, hi)) = ctx.window {
        report.set("window", json!([lo, hi]));
    }
    match command {
        Command::Check => check(&ctx, &mut report)?,
        Command::Homology => homology(&ctx, &mut report)?,
        Command::Ext => ext(&ctx, &mut report)?,
        Command::Lift => lift_cmd(&ctx, &mut report)?,
        Command::LiftIterated => lift_iterated_cmd(&ctx, &mut report)?,
        Command::Unique => unique(&ctx, &mut report)?,
        Command::Semidualizing => semidualizing(&ctx, &mut report)?,
        Command::Resolve => resolve(&ctx, &mut report)?,
    }
    Ok(report)
}

fn check<R: TruncatedRing>(ctx: &Context<R>, report: &mut Report) -> Result<(), CliError> {
    let spec = &ctx.problem.module;
    let d = ctx.module(spec)?;
    report.line(format!("valid {} module over {}", spec.kind(), ctx.working_name()));
    let normalized = match spec {
        ModuleSpec::Block { .. } => {
            let n = spec.to_block(ctx.block()?)?;
            report.lines.extend(describe_block(&n));
            report.line(format!("  delta valuation {}", n.delta_valuation()));
            report.set("delta_valuation", n.delta_valuation());
            ModuleSpec::from_block(&n)
        }
        ModuleSpec::SemiFree { .. } => {
            let m = d.as_semifree().expect("semi-free input");
            report.lines.extend(describe_semifree(m));
            report.set("minimal", m.is_minimal());
            ModuleSpec::from_semifree(m)
        }
        ModuleSpec::Complex { .. } => spec.clone(),
    };
    let c = d.complex();
    let ranks: Vec<Value> = match c.bounds() {
        Some((lo, hi)) => (lo..=hi).map(|k| json!([k, c.rank(k)])).collect(),
        None => vec![],
    };
    report.line(format!(
        "  R-ranks {}",
        ranks
            .iter()
            .map(|r| format!("{}:{}", r[0], r[1]))
            .collect::<Vec<_>>()
            .join(" ")
    ));
    report.set("ranks", ranks);
    report.set("module", spec_json(&normalized));
    report.status("valid", EXIT_OK);
    Ok(())
}

fn homology<R: TruncatedRing>(ctx: &Context<R>, report: &mut Report) -> Result<(), CliError> {
    let d = ctx.module(&ctx.problem.module)?;
    let h = d.complex().homology(ctx.window)?;
    for (k, inv) in &h {
        report.line(format!("H_{k} = {}", homology_group(&ctx.ring, inv)));
    }
    report.set("homology", homology_json(&h));
    report.set("precision", ctx.ring.precision());
    report.status("ok", EXIT_OK);
    Ok(())
}

fn ext<R: TruncatedRing>(ctx: &Context<R>, report: &mut Report) -> Result<(), CliError> {
    let i = ctx
        .opts
        .degree
        .or(ctx.problem.degree)
        .ok_or_else(|| CliError::Input("ext needs --degree".into()))?;
    let source = semi_free_resolution(&ctx.module(&ctx.problem.module)?, ctx.window)?.module;
    let target = match &ctx.problem.other {
        Some(o) => semi_free_resolution(&ctx.module(o)?, ctx.window)?.module,
        None => source.clone(),
    };
    let r = ext_is_zero(i, &source, &target, ctx.window, ctx.exec)?;
    match &r.status {
        ExtStatus::Zero => {
            report.line(format!("Ext^{i} = 0"));
            report.status("zero", EXIT_OK);
        }
        ExtStatus::Nonzero(f) => {
            report.line(format!("Ext^{i} != 0"));
            report.line(format!(
                "  witness: cycle of degree {} that is not a boundary",
                f.degree
            ));
            for (g, v) in f.values.iter().enumerate() {
                let d = source.layout().degree(g) + f.degree;
                report.line(format!("  b{g} -> {}", combination(target.layout(), d, v)));
            }
            report.status("nonzero", EXIT_OBSTRUCTED);
        }
        ExtStatus::Inconclusive(reason) => {
            report.line(format!("Ext^{i} inconclusive: {reason}"));
            report.status("inconclusive", EXIT_INCONCLUSIVE);
        }
    }
    report.set("degree", i);
    report.set("ext", r.to_json(&ctx.ring));
    Ok(())
}

fn obstruction<R: TruncatedRing>(
    ctx: &Context<R>,
    report: &mut Report,
    module: &BlockModule<R>,
    stage: usize,
    cycle: &[Vec<Value>],
) -> Result<(), CliError> {
    report.line(format!(
        "obstruction at stage {stage}: the cycle b -> [0; delta_red(b)] of degree -2 is not null-homotopic"
    ));
    let layout = module.layout();
    for (g, v) in cycle.iter().enumerate() {
        let v = parse_vector(&ctx.ring, v)?;
        if v.iter().any(|x| !ctx.ring.is_zero(x)) {
            let d = layout.degree(g) - 2;
            report.line(format!("  delta_red(b{g}) = {}", combination(layout, d, &v)));
        }
    }
    report.set("stage", stage);
    report.set("witness", json!({"degree": -2, "delta_red": cycle}));
    report.status("obstructed", EXIT_OBSTRUCTED);
    Ok(())
}

fn lift_cmd<R: TruncatedRing>(ctx: &Context<R>, report: &mut Report) -> Result<(), CliError> {
    let b = ctx.block()?;
    let spec = &ctx.problem.module;
    // a module given by matrices is resolved first, giving a quasi-lift
    let (n, target) = match spec {
        ModuleSpec::Complex { .. } => {
            let d = ctx.module(spec)?;
            let (n, _) = semi_free_resolution_block(&d, b.clone(), ctx.window)?;
            (n, Some(d))
        }
        _ => (spec.to_block(b)?, None),
    };
    let result = match lift(&n, &ctx.lift_options(ctx.seed())) {
        Ok(r) => r,
        Err(LiftError::ObstructionNonzero {
            stage,
            transcript,
            cycle,
        }) => {
            report.transcript = Some(transcript_lines(&transcript, None));
            report.set("transcript", transcript_json(&transcript));
            return obstruction(ctx, report, &n, stage, &cycle);
        }
        Err(e) => return Err(e.into()),
    };
    let verified = verify_lift(&n, &result);
    report.line(format!("lifted to {}", ctx.base_name()));
    report.lines.extend(describe_semifree(&result.lifted));
    report.line(format!(
        "  {} stages, isomorphism N -> B ⊗ M {}",
        result.transcript.len(),
        if verified { "verified" } else { "FAILED verification" }
    ));
    if let Some(d) = target {
        let window = ctx.window.or_else(|| d.complex().bounds()).unwrap_or_default();
        let quasi = verify_quasilift(&result.lifted, b, &d, window)?;
        report.line(format!(
            "  homology of B ⊗ M matches the input in {}..{}: {quasi}",
            window.0, window.1
        ));
        report.set("quasi_lift", quasi);
    }
    report.set("lifted", spec_json(&ModuleSpec::from_semifree(&result.lifted)));
    report.set("iso", ctx.map_json(&result.iso));
    report.set("verified", verified);
    report.set("transcript", transcript_json(&result.transcript));
    report.transcript = Some(result.transcript_jsonl());
    if verified {
        report.status("lifted", EXIT_OK);
    } else {
        return Err(CliError::Input(
            "internal check failed: lift isomorphism did not verify".into(),
        ));
    }
    Ok(())
}

fn lift_iterated_cmd<R: TruncatedRing>(ctx: &Context<R>, report: &mut Report) -> Result<(), CliError> {
    if ctx.block.is_some() {
        return Err(CliError::Input(
            "lift-iterated peels the variables of \"algebra\"; drop \"lift_along\"".into(),
        ));
    }
    let d = ctx.module(&ctx.problem.module)?;
    let result = match lift_iterated(&d, &ctx.elements, ctx.window, &ctx.lift_options(ctx.seed())) {
        Ok(r) => r,
        Err(IteratedError::Lift {
            variable,
            source:
                LiftError::ObstructionNonzero {
                    stage,
                    transcript,
                    cycle,
                },
        }) => {
            report.line(format!("variable {variable}:"));
            report.transcript = Some(transcript_lines(&transcript, Some(variable)));
            report.set("variable", variable);
            report.set("transcript", transcript_json(&transcript));
            // the witness lives on the resolved stage module, which is not returned; print raw values
            report.line(format!(
                "obstruction at stage {stage}: the cycle b -> [0; delta_red(b)] of degree -2 is not null-homotopic"
            ));
            report.set("stage", stage);
            report.set("witness", json!({"degree": -2, "delta_red": cycle}));
            report.status("obstructed", EXIT_OBSTRUCTED);
            return Ok(());
        }
        Err(e) => return Err(e.into()),
    };
    let mut stages = Vec::new();
    let mut lines = String::new();
    for s in &result.stages {
        let ext2 = match &s.ext2.status {
            ExtStatus::Zero => "zero",
            ExtStatus::Nonzero(_) => "nonzero",
            ExtStatus::Inconclusive(_) => "inconclusive",
        };
        report.line(format!(
            "variable {}: resolved with {} generators, Ext^2 {ext2}, {} stages",
            s.variable,
            s.block.generator_count(),
            s.lift.transcript.len()
        ));
        lines.push_str(&transcript_lines(&s.lift.transcript, Some(s.variable)));
        stages.push(json!({
            "variable": s.variable,
            "generators": s.block.generator_count(),
            "ext2": s.ext2.to_json(&ctx.ring),
            "transcript": transcript_json(&s.lift.transcript),
        }));
    }
    report.line("complex over R:");
    report.lines.extend(describe_semifree(&result.complex));
    let c = result.complex.complex();
    let window = ctx.window.or_else(|| c.bounds());
    if let Some(w) = window {
        let h = c.homology(Some(w))?;
        for (k, inv) in &h {
            report.line(format!("  H_{k} = {}", homology_group(&ctx.ring, inv)));
        }
        report.set("homology", homology_json(&h));
    }
    report.set("complex", spec_json(&ModuleSpec::from_semifree(&result.complex)));
    report.set("stages", stages);
    report.transcript = Some(lines);
    report.status("lifted", EXIT_OK);
    Ok(())
}

fn unique<R: TruncatedRing>(ctx: &Context<R>, report: &mut Report) -> Result<(), CliError> {
    let b = ctx.block()?;
    let spec = &ctx.problem.module;
    let (m, m2, upsilon) = match spec {
        ModuleSpec::Block { .. } => {
            // two lifts of N, with and without perturbed homotopies
            let n = spec.to_block(b)?;
            let seed = ctx.seed().unwrap_or(1);
            let lifts: Vec<Result<LiftResult<R>, LiftError>> = [None, Some(seed)]
                .iter()
                .map(|p| lift(&n, &ctx.lift_options(*p)))
                .collect();
            let mut ok = Vec::new();
            for l in lifts {
                match l {
                    Ok(r) => ok.push(r),
                    Err(LiftError::ObstructionNonzero {
                        stage,
                        transcript,
                        cycle,
                    }) => {
                        report.set("transcript", transcript_json(&transcript));
                        return obstruction(ctx, report, &n, stage, &cycle);
                    }
                    Err(e) => return Err(e.into()),
                }
            }
            let upsilon = connecting_iso(&n, &ok[0], &ok[1])?;
            report.line(format!("two lifts of N (default and seed {seed}):"));
            report.lines.extend(describe_semifree(&ok[0].lifted));
            report.lines.extend(describe_semifree(&ok[1].lifted));
            report.set("distinct", ok[0].lifted != ok[1].lifted);
            (ok[0].lifted.clone(), ok[1].lifted.clone(), upsilon)
        }
        _ => {
            let other = ctx
                .problem
                .other
                .as_ref()
                .ok_or_else(|| CliError::Input("unique needs \"other\" or a block module".into()))?;
            let upsilon = ctx
                .problem
                .upsilon
                .as_ref()
                .ok_or_else(|| CliError::Input("unique needs \"upsilon\"".into()))?;
            (
                spec.to_semifree(&ctx.base)?,
                other.to_semifree(&ctx.base)?,
                upsilon.to_map(&ctx.ring)?,
            )
        }
    };
    report.set("source", spec_json(&ModuleSpec::from_semifree(&m)));
    report.set("target", spec_json(&ModuleSpec::from_semifree(&m2)));
    report.set("upsilon", ctx.map_json(&upsilon));
    match uniqueness_iso(&m, &m2, b, &upsilon, ctx.exec) {
        Ok(u) => {
            report.line("isomorphism M -> M':");
            for (g, v) in u.iso.values.iter().enumerate() {
                report.line(format!(
                    "  b{g} -> {}",
                    combination(m2.layout(), m.layout().degree(g), v)
                ));
            }
            report.set("iso", ctx.map_json(&u.iso));
            report.set("local", u.local);
            report.status("isomorphic", EXIT_OK);
        }
        Err(LiftError::Ext1Obstruction(stage)) => {
            report.line(format!("Ext^1 obstruction at stage {stage}: no correction term exists"));
            report.set("stage", stage);
            report.status("obstructed", EXIT_OBSTRUCTED);
        }
        Err(LiftError::NotAnIso) => {
            return Err(CliError::Input(
                "upsilon is not an isomorphism between the base changes".into(),
            ))
        }
        Err(e) => return Err(e.into()),
    }
    Ok(())
}

fn semidualizing<R: TruncatedRing>(ctx: &Context<R>, report: &mut Report) -> Result<(), CliError> {
    let f = semi_free_resolution(&ctx.module(&ctx.problem.module)?, ctx.window)?.module;
    match homothety_check(&f, ctx.window, ctx.exec)? {
        HomothetyStatus::Semidualizing => {
            report.line(format!("semidualizing over {}", ctx.working_name()));
            report.status("semidualizing", EXIT_OK);
        }
        HomothetyStatus::No { degree, invariants } => {
            report.line(format!(
                "not semidualizing: the homothety cone has homology {} in degree {degree}",
                homology_group(&ctx.ring, &invariants)
            ));
            report.set("degree", degree);
            report.set("invariants", invariants);
            report.status("not_semidualizing", EXIT_OBSTRUCTED);
        }
        HomothetyStatus::Inconclusive(reason) => {
            report.line(format!("inconclusive: {reason}"));
            report.status("inconclusive", EXIT_INCONCLUSIVE);
        }
    }
    Ok(())
}

fn resolve<R: TruncatedRing>(ctx: &Context<R>, report: &mut Report) -> Result<(), CliError> {
    let d = ctx.module(&ctx.problem.module)?;
    let res = semi_free_resolution(&d, ctx.window)?;
    let f: &SemiFreeModule<R> = &res.module;
    report.line(format!("semi-free resolution over {}", ctx.working_name()));
    report.lines.extend(describe_semifree(f));
    let bounds = ctx.window.or_else(|| d.complex().bounds());
    if let Some((lo, hi)) = bounds {
        let hi = f.complete_through().map_or(hi, |c| hi.min(c - 1));
        let verified = lo > hi || verify_quasi_isomorphism(f, &d, &res.phi, lo, hi);
        report.line(format!("  quasi-isomorphism in degrees {lo}..{hi}: {verified}"));
        report.set("verified", json!({"lo": lo, "hi": hi, "ok": verified}));
    }
    if let Some(b) = &ctx.block {
        let n = BlockModule::from_total_module(b.clone(), f)?;
        report.set("block", spec_json(&ModuleSpec::from_block(&n)));
    }
    report.set("module", spec_json(&ModuleSpec::from_semifree(f)));
    report.set(
        "phi",
        res.phi.iter().map(|v| vector_to_json(&ctx.ring, v)).collect::<Vec<_>>(),
    );
    report.set("complete_through", f.complete_through());
    report.status(
        if f.complete_through().is_none() {
            "complete"
        } else {
            "truncated"
        },
        EXIT_OK,
    );
    Ok(())
}
