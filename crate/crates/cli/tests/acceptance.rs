//! Acceptance suite: one PASS/FAIL line per criterion.

use std::collections::BTreeSet;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::process::Command;
use std::time::{Duration, Instant};

use proptest::test_runner::{Config, RngAlgorithm, TestCaseError, TestRng, TestRunner};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use vizreq_core::dashboard::ValidationOutcome;
use vizreq_core::derivation::{
    compute_skyline, Coordinate, CoordinateValue, Score, ScoreVector, SuitabilityMatrix, VisualizationContext, BUBBLE,
    PIE, STACKED_COLUMN,
};
use vizreq_core::model::{
    apply_revision, parse_model, serialize_model, validate_model, DataBinding, GoalModel, RevisionPatch, Skill,
    Structure, VisualizationGoal, VisualizationTask,
};
use vizreq_core::pipeline::{derive_visualization, ColumnTypings, DataCatalog, Derivation, DeriveSettings};
use vizreq_core::profiler::{
    classify_cardinality, classify_variable_type, compute_dimensionality, profile_column, Cardinality, Dataset,
    DimensionalityClass, TypingAnswer, VariableType, DEFAULT_CARDINALITY_THRESHOLD,
};
use vizreq_core::DiagnosticCode;
use vizreq_service::session::UploadedDataset;
use vizreq_service::{AnswerRequest, Event, ReviseRequest, ServiceConfig, Session, SessionStore, State};

const TYPE_OF_UNPAID: &str = "Type of unpaid bills";
const SEED: u64 = 0x5eed_2019;

fn manifest() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
}

fn fixture(name: &str) -> PathBuf {
    manifest().join("../core/tests/fixtures").join(name)
}

fn read(name: &str) -> String {
    std::fs::read_to_string(fixture(name)).unwrap()
}

fn set(items: &[&str]) -> BTreeSet<String> {
    items.iter().map(|s| s.to_string()).collect()
}

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

macro_rules! check {
    ($cond:expr, $($fmt:tt)+) => {
        if !$cond {
            return Err(format!($($fmt)+));
        }
    };
}

fn tax_model() -> GoalModel {
    parse_model(&read("tax.model")).unwrap()
}

fn revised_model() -> GoalModel {
    apply_revision(
        &tax_model(),
        &RevisionPatch::from_json(&read("province-patch.json")).unwrap(),
    )
    .unwrap()
}

fn derive_type_of_unpaid(model: &GoalModel) -> Derivation {
    let catalog = DataCatalog::load_dir(fixture("tax-data")).unwrap();
    let typings = ColumnTypings::from_json(&read("tax-answers.json")).unwrap();
    let vis = model.find_visualization(TYPE_OF_UNPAID).unwrap().visualization;
    derive_visualization(
        vis,
        &model.actor,
        &catalog,
        &typings,
        &SuitabilityMatrix::shipped_reference(),
        &DeriveSettings::default(),
    )
    .unwrap()
}

fn offenders(d: &Derivation, chart: &str) -> BTreeSet<String> {
    d.recommendation
        .exclusion(chart)
        .map(|x| x.offenders.iter().map(|v| v.label().to_string()).collect())
        .unwrap_or_default()
}

fn context_labels(ctx: &VisualizationContext) -> String {
    ctx.to_string()
}

fn initial_round() -> Outcome {
    let bills = Dataset::from_reader(read("tax-data/Bills.csv").as_bytes(), "Bills", "Bills.csv").unwrap();
    let types = profile_column(&bills, "Type").unwrap();
    let amounts = profile_column(&bills, "Amount").unwrap();
    check!(types.distinct_count == 6, "fixture has {} types", types.distinct_count);
    check!(!amounts.has_negative, "fixture has negative amounts");

    let start = Instant::now();
    let d = derive_type_of_unpaid(&tax_model());
    let elapsed = start.elapsed();
    let ctx = context_labels(&d.context);
    check!(
        ctx == "{Composition; Overview; Lay; 2-dimensional; Low; Nominal; Ratio}",
        "context {ctx}"
    );
    check!(
        d.recommendation.skyline == set(&[PIE]),
        "skyline {:?}",
        d.recommendation.skyline
    );
    check!(
        offenders(&d, STACKED_COLUMN) == set(&["2-dimensional"]),
        "stacked column offenders {:?}",
        offenders(&d, STACKED_COLUMN)
    );
    check!(
        offenders(&d, BUBBLE) == set(&["Composition", "Nominal", "2-dimensional"]),
        "bubble offenders {:?}",
        offenders(&d, BUBBLE)
    );
    check!(elapsed < Duration::from_secs(1), "took {elapsed:?}");
    Ok(format!(
        "context {ctx}; skyline {{Pie Chart}}; exact match; {elapsed:.2?} < 1s"
    ))
}

fn revision_round() -> Outcome {
    let m = revised_model();
    let d = derive_type_of_unpaid(&m);
    let ctx = context_labels(&d.context);
    check!(
        d.context.goals == [VisualizationGoal::Composition, VisualizationGoal::Comparison].into(),
        "goals {ctx}"
    );
    check!(
        d.context.dimensionality == DimensionalityClass::NDimensional,
        "context {ctx}"
    );
    check!(
        d.recommendation.skyline == set(&[STACKED_COLUMN]),
        "skyline {:?}",
        d.recommendation.skyline
    );
    check!(
        offenders(&d, PIE) == set(&["Comparison", "n-dimensional"]),
        "pie offenders {:?}",
        offenders(&d, PIE)
    );
    Ok(format!("context {ctx}; skyline {{Stacked Column Chart}}; exact match"))
}

/// Reads the checked-in transcription: `coordinate value chart...` rows.
fn transcription() -> Vec<(String, String, String, String)> {
    let text = read("reference-scores.tsv");
    let mut lines = text.lines();
    let header: Vec<&str> = lines.next().unwrap().split('\t').collect();
    let mut cells = Vec::new();
    for line in lines.filter(|l| !l.trim().is_empty()) {
        let cols: Vec<&str> = line.split('\t').collect();
        for (chart, score) in header[2..].iter().zip(&cols[2..]) {
            cells.push((
                chart.to_string(),
                cols[0].to_string(),
                cols[1].to_string(),
                score.to_string(),
            ));
        }
    }
    cells
}

fn reference_table_fidelity() -> Outcome {
    let cells = transcription();
    check!(cells.len() == 27, "transcription has {} cells", cells.len());
    let sources = [
        ("reference", SuitabilityMatrix::shipped_reference_source()),
        ("default", SuitabilityMatrix::shipped_default_source()),
    ];
    for (name, source) in sources {
        let doc: serde_json::Value = serde_json::from_str(source).unwrap();
        let charts = doc["charts"].as_array().unwrap();
        let parsed = SuitabilityMatrix::from_json(source).map_err(|e| format!("{name}: {e}"))?;
        for (chart, coord, value, expected) in &cells {
            let raw = charts
                .iter()
                .find(|c| c["name"] == chart.as_str())
                .and_then(|c| c["scores"][coord.as_str()][value.as_str()].as_str());
            check!(
                raw == Some(expected.as_str()),
                "{name}: {chart} × {value}: raw {raw:?}, published {expected}"
            );
            let cv = Coordinate::from_key(coord)
                .and_then(|c| CoordinateValue::parse(c, value))
                .ok_or_else(|| format!("unknown coordinate value {coord}/{value}"))?;
            let api = parsed.chart(chart).and_then(|c| c.score(cv)).map(Score::label);
            check!(
                api == Some(expected.as_str()),
                "{name}: {chart} × {value}: loaded {api:?}, published {expected}"
            );
        }
    }
    Ok("27/27 cells byte-exact in both shipped matrices".into())
}

fn brute_force_skyline(vectors: &[ScoreVector]) -> BTreeSet<String> {
    let feasible: Vec<&ScoreVector> = vectors.iter().filter(|v| !v.excluded).collect();
    let beats = |a: &ScoreVector, b: &ScoreVector| {
        let (a, b) = (a.ordinals(), b.ordinals());
        a.iter().zip(&b).all(|(x, y)| x >= y) && a.iter().zip(&b).any(|(x, y)| x > y)
    };
    feasible
        .iter()
        .filter(|v| !feasible.iter().any(|w| beats(w, v)))
        .map(|v| v.chart.clone())
        .collect()
}

fn skyline_oracle() -> Outcome {
    const INSTANCES: usize = 10_000;
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut nonempty = 0;
    for i in 0..INSTANCES {
        let charts = rng.gen_range(1..=8);
        let vectors: Vec<ScoreVector> = (0..charts)
            .map(|c| {
                let aggregated: [Score; 7] =
                    std::array::from_fn(|_| Score::from_ordinal(rng.gen_range(0..=3)).unwrap());
                ScoreVector {
                    chart: format!("chart{c}"),
                    aggregated,
                    excluded: aggregated.contains(&Score::Unfit),
                    breakdown: Vec::new(),
                }
            })
            .collect();
        let got = compute_skyline(&vectors);
        let want = brute_force_skyline(&vectors);
        check!(got == want, "instance {i}: got {got:?}, brute force {want:?}");
        nonempty += usize::from(!want.is_empty());
    }
    let elapsed = start.elapsed();
    check!(elapsed < Duration::from_secs(30), "took {elapsed:?}");
    Ok(format!(
        "{INSTANCES}/{INSTANCES} agree ({nonempty} with survivors), 100% required; {elapsed:.2?} < 30s"
    ))
}

fn column(values: &[String]) -> Dataset {
    let mut csv = String::from("x\n");
    for v in values {
        csv.push_str(v);
        csv.push('\n');
    }
    Dataset::from_reader(csv.as_bytes(), "T", "T.csv").unwrap()
}

fn profiler_rules() -> Outcome {
    const CASES: usize = 2_000;
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    for i in 0..CASES {
        let n = rng.gen_range(1..40);
        let values: Vec<i64> = (0..n).map(|_| rng.gen_range(-500..500)).collect();
        let decimals = rng.gen_range(0..3usize);
        let text: Vec<String> = values
            .iter()
            .map(|&v| {
                if decimals == 0 {
                    v.to_string()
                } else {
                    format!("{:.*}", decimals, v as f64 / 4.0)
                }
            })
            .collect();
        let profile = profile_column(&column(&text), "x").unwrap();
        let expected = if values.iter().any(|&v| v < 0) {
            VariableType::Interval
        } else {
            VariableType::Ratio
        };
        let got = classify_variable_type(&profile, None).map_err(|e| e.to_string())?;
        check!(got == expected, "sign rule case {i}: {text:?} gave {got:?}");
    }
    for i in 0..CASES {
        let distinct = rng.gen_range(1..100usize);
        let threshold = rng.gen_range(1..80u32);
        let text: Vec<String> = (0..distinct * rng.gen_range(1..3))
            .map(|k| format!("v{}", k % distinct))
            .collect();
        let profile = profile_column(&column(&text), "x").unwrap();
        check!(
            profile.distinct_count == distinct,
            "threshold case {i}: distinct {}",
            profile.distinct_count
        );
        let class = classify_cardinality(&profile, threshold.try_into().unwrap());
        check!(
            (class.value == Cardinality::Low) == (distinct <= threshold as usize),
            "threshold case {i}: {distinct} distinct at threshold {threshold} gave {:?}",
            class.value
        );
    }
    for n in 0..12usize {
        let vis = VisualizationTask {
            name: "V".into(),
            goals: Default::default(),
            interactions: Default::default(),
            bindings: (0..n).map(|k| DataBinding::category(format!("a{k}"), "T")).collect(),
            structure: Structure::Flat,
        };
        let expected = match n {
            0 | 1 => DimensionalityClass::OneDimensional,
            2 => DimensionalityClass::TwoDimensional,
            _ => DimensionalityClass::NDimensional,
        };
        check!(
            compute_dimensionality(&vis) == expected,
            "dimensionality for {n} bindings"
        );
    }
    let bills = Dataset::from_reader(read("tax-data/Bills.csv").as_bytes(), "Bills", "Bills.csv").unwrap();
    let types = profile_column(&bills, "Type").unwrap();
    let card = classify_cardinality(&types, DEFAULT_CARDINALITY_THRESHOLD).value;
    check!(card == Cardinality::Low, "6 types gave {card:?}");
    let ty = TypingAnswer::Ordered(false)
        .resolve(&types)
        .map_err(|e| e.to_string())?;
    check!(ty == VariableType::Nominal, "Type with no order gave {ty:?}");
    Ok(format!(
        "{CASES} sign cases, {CASES} threshold cases, 12 binding counts, fixture checks; 100% pass"
    ))
}

fn dsl_round_trip() -> Outcome {
    const CASES: u32 = 1_000;
    let mut runner = TestRunner::new_with_rng(
        Config {
            cases: CASES,
            failure_persistence: None,
            ..Config::default()
        },
        TestRng::deterministic_rng(RngAlgorithm::ChaCha),
    );
    let checked = std::cell::Cell::new(0u32);
    runner
        .run(&vizreq_core::testing::arb_model(), |m| {
            checked.set(checked.get() + 1);
            let text = serialize_model(&m);
            let back = parse_model(&text).map_err(|d| TestCaseError::fail(format!("{d:?}\n{text}")))?;
            if back != m {
                return Err(TestCaseError::fail(format!("structural mismatch\n{text}")));
            }
            Ok(())
        })
        .map_err(|e| e.to_string())?;
    let checked = checked.get();
    check!(checked >= CASES, "only {checked} cases ran");

    let mut fired = BTreeSet::new();
    for entry in std::fs::read_dir(fixture("diagnostics")).unwrap() {
        let source = std::fs::read_to_string(entry.unwrap().path()).unwrap();
        let diags = match parse_model(&source) {
            Err(d) => d,
            Ok(m) => validate_model(&m),
        };
        fired.extend(diags.iter().map(|d| d.code));
    }
    let missing: Vec<&str> = DiagnosticCode::ALL
        .iter()
        .filter(|c| !fired.contains(c))
        .map(|c| c.as_str())
        .collect();
    check!(missing.is_empty(), "codes never fired: {missing:?}");
    Ok(format!(
        "{checked}/{CASES} generated models round-trip; {}/{} diagnostic codes fire on the corpus",
        fired.len(),
        DiagnosticCode::ALL.len()
    ))
}

fn upload_event() -> Event {
    Event::DatasetsUploaded {
        datasets: ["Bills", "Date", "Dossier", "Location"]
            .into_iter()
            .map(|c| UploadedDataset {
                collection: c.into(),
                csv: read(&format!("tax-data/{c}.csv")),
            })
            .collect(),
        answers: ColumnTypings::from_json(&read("tax-answers.json")).unwrap(),
    }
}

fn validated(name: &str) -> Event {
    Event::Validated {
        outcome: ValidationOutcome::from_json(&read(name)).unwrap(),
    }
}

fn tax_script() -> Vec<Event> {
    vec![
        Event::Answered {
            request: AnswerRequest::Model {
                source: read("tax.model"),
            },
        },
        upload_event(),
        validated("validation-reject-pie.json"),
        Event::Revised {
            request: ReviseRequest {
                patches: vec![RevisionPatch::from_json(&read("province-patch.json")).unwrap()],
                abandon: Default::default(),
            },
        },
        validated("validation-approve-all.json"),
    ]
}

fn scripted_service_run() -> Result<(Session, String), String> {
    let store = SessionStore::in_memory(ServiceConfig::default());
    let id = store.create().map_err(|e| e.to_string())?.id;
    for (v, e) in tax_script().into_iter().enumerate() {
        store.apply(&id, v as u64, e).map_err(|e| e.to_string())?;
    }
    let s = store.get(&id).map_err(|e| e.to_string())?;
    let doc = s.dashboard().map_err(|e| e.to_string())?.to_json();
    Ok((s, doc))
}

fn emitted_properly(s: &Session) -> bool {
    let n = s.trail.len();
    s.state != State::Emitted || (n >= 2 && s.trail[n - 2] == State::Validating && s.dashboard.is_some())
}

fn cli_emit() -> Result<Vec<u8>, String> {
    let f = |n: &str| fixture(n).display().to_string();
    let out = Command::new(env!("CARGO_BIN_EXE_vizreq"))
        .args([
            "emit",
            &f("tax.model"),
            "--data",
            &f("tax-data"),
            "--answers",
            &f("tax-answers.json"),
        ])
        .args([
            "--patch",
            &f("province-patch.json"),
            "--validation",
            &f("validation-approve-all.json"),
        ])
        .env_remove("VIZREQ_MATRIX")
        .output()
        .map_err(|e| e.to_string())?;
    check!(
        out.status.success(),
        "cli emit failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    Ok(out.stdout)
}

fn pipeline_property() -> Outcome {
    let (session, doc) = scripted_service_run()?;
    check!(
        session.state == State::Emitted,
        "scripted session ended in {:?}",
        session.state
    );
    let validating = session.trail.iter().filter(|s| **s == State::Validating).count();
    check!(
        validating >= 1 && emitted_properly(&session),
        "trail {:?}",
        session.trail
    );

    let parsed: serde_json::Value = serde_json::from_str(&doc).unwrap();
    let dashboards = parsed["dashboards"].as_array().unwrap();
    check!(dashboards.len() == 1, "{} dashboards", dashboards.len());
    check!(
        dashboards[0]["group"]["analysis_type"] == "Diagnostic",
        "group {}",
        dashboards[0]["group"]
    );
    let panels = dashboards[0]["panels"].as_array().unwrap().len();
    check!(panels == 4, "{panels} panels");

    let (_, again) = scripted_service_run()?;
    check!(again == doc, "service output differs between runs");
    let cli = cli_emit()?;
    check!(cli == doc.as_bytes(), "cli emit differs from the service dashboard");
    check!(cli_emit()? == cli, "cli output differs between runs");

    // random scripts over the whole event vocabulary
    const SCRIPTS: usize = 300;
    let mut pool = tax_script();
    pool.push(Event::Answered {
        request: AnswerRequest::Begin {
            actor: "A".into(),
            skill: Skill::Lay,
            strategic: "S".into(),
        },
    });
    pool.push(Event::Answered {
        request: AnswerRequest::Typing {
            column: "Type".into(),
            value: TypingAnswer::Ordered(true),
        },
    });
    pool.push(Event::Revised {
        request: ReviseRequest::default(),
    });
    let config = ServiceConfig::default();
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut reached = 0;
    for i in 0..SCRIPTS {
        let mut s = Session::new("r");
        for _ in 0..rng.gen_range(1..16) {
            let e = &pool[rng.gen_range(0..pool.len())];
            if let Ok(next) = s.apply(e, &config) {
                s = next;
            }
            check!(emitted_properly(&s), "script {i}: trail {:?}", s.trail);
        }
        reached += usize::from(s.state == State::Emitted);
    }
    Ok(format!(
        "1 Diagnostic dashboard, 4 panels; service and CLI byte-identical across runs; {SCRIPTS} random scripts ({reached} emitted) all validated first"
    ))
}

fn main() {
    let criteria: [Criterion; 7] = [
        ("worked example, initial round", initial_round),
        ("worked example, revision round", revision_round),
        ("suitability table fidelity", reference_table_fidelity),
        ("skyline oracle equivalence", skyline_oracle),
        ("profiler rules", profiler_rules),
        ("DSL round-trip and diagnostic corpus", dsl_round_trip),
        ("pipeline property", pipeline_property),
    ];
    let mut failed = 0;
    for (name, check) in criteria {
        let result = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        match result {
            Ok(detail) => println!("[PASS] {name}: {detail}"),
            Err(why) => {
                failed += 1;
                println!("[FAIL] {name}: {why}");
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
