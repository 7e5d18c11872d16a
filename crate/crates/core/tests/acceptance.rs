//! End-to-end acceptance run: one PASS/FAIL line per criterion.
//!
//! Run with `cargo test -p heckeforge-core --test acceptance -- --nocapture`
//! to see the report.

use std::time::{Duration, Instant};

use heckeforge::rootdata::{CartanType, Isogeny};
use heckeforge::suites::{run_suite, SuiteConfig, SuiteOutcome, Verdict};
use heckeforge::with_field;

const RELATIONS_BUDGET: Duration = Duration::from_secs(60);
const FROBENIUS_BUDGET: Duration = Duration::from_secs(30);
const A2_RESOLUTION_BUDGET: Duration = Duration::from_secs(300);

const A1_SC: (CartanType, Isogeny) = (CartanType::A1, Isogeny::SimplyConnected);
const A1_ADJ: (CartanType, Isogeny) = (CartanType::A1, Isogeny::Adjoint);
const A1_GL: (CartanType, Isogeny) = (CartanType::A1, Isogeny::GlStyle(1));
const A2_SC: (CartanType, Isogeny) = (CartanType::A2, Isogeny::SimplyConnected);
const A2_ADJ: (CartanType, Isogeny) = (CartanType::A2, Isogeny::Adjoint);
const ALL_DATA: [(CartanType, Isogeny); 5] = [A1_SC, A1_ADJ, A1_GL, A2_SC, A2_ADJ];

fn field_name(p: u64) -> String {
    if p == 0 { "Q".into() } else { format!("F{p}") }
}

fn label(d: (CartanType, Isogeny), q: u64, p: u64) -> String {
    format!("{:?}-{:?} q={q} over {}", d.0, d.1, field_name(p))
}

fn run(suite: &str, d: (CartanType, Isogeny), q: u64, p: u64, n_max: usize) -> (SuiteOutcome, Duration) {
    let cfg = SuiteConfig { cartan: d.0, isogeny: d.1, q, n_max, c_max: 4, seed: 0 };
    let start = Instant::now();
    let out = with_field!(p, K => run_suite::<K>(suite, &cfg)).expect("supported characteristic");
    (out, start.elapsed())
}

#[derive(Default)]
struct Criterion {
    runs: usize,
    problems: Vec<String>,
    facts: Vec<String>,
}

impl Criterion {
    fn expect(&mut self, ok: bool, what: impl FnOnce() -> String) {
        if !ok {
            self.problems.push(what());
        }
    }

    fn require_pass(&mut self, out: &SuiteOutcome, tag: &str) {
        self.runs += 1;
        self.expect(out.verdict == Verdict::Pass, || {
            let first = out.checks.iter().find(|c| !c.passed).map(|c| c.name.clone());
            format!("{tag}: {:?} ({})", out.verdict, first.or(out.error.clone()).unwrap_or_default())
        });
    }

    fn finish(self, n: usize, title: &str) -> bool {
        let ok = self.problems.is_empty();
        let status = if ok { "PASS" } else { "FAIL" };
        let mut line = format!("criterion {n} [{status}] {title}: {} runs", self.runs);
        for f in &self.facts {
            line.push_str("; ");
            line.push_str(f);
        }
        println!("{line}");
        for p in self.problems.iter().take(5) {
            println!("    {p}");
        }
        ok
    }
}

fn has_check(out: &SuiteOutcome, needle: &str) -> bool {
    out.checks.iter().any(|c| c.passed && c.name.contains(needle))
}

fn relations() -> bool {
    let mut c = Criterion::default();
    let mut slowest = Duration::ZERO;
    let mut compressions = 0;
    for d in ALL_DATA {
        for q in [2, 3, 4] {
            for p in [2, 3, 0] {
                let tag = label(d, q, p);
                let (out, t) = run("relations", d, q, p, 4);
                c.require_pass(&out, &tag);
                c.expect(t < RELATIONS_BUDGET, || format!("{tag}: {t:?} over budget"));
                c.expect(has_check(&out, "associativity"), || format!("{tag}: no associativity check"));
                c.expect(has_check(&out, "iota_C"), || format!("{tag}: no involution check"));
                let q_minus_one_invertible = p == 0 || (q - 1) % p != 0;
                let compressed = has_check(&out, "eps_1");
                c.expect(compressed || !q_minus_one_invertible || out.notes.iter().any(|n| n.contains("eps_1")), || {
                    format!("{tag}: compression neither checked nor explained")
                });
                compressions += compressed as usize;
                slowest = slowest.max(t);
            }
        }
    }
    c.facts.push(format!("{compressions} compression checks"));
    c.facts.push(format!("slowest {:.1} s (budget {} s)", slowest.as_secs_f64(), RELATIONS_BUDGET.as_secs()));
    c.finish(1, "relations")
}

fn coxeter() -> bool {
    let mut c = Criterion::default();
    for d in ALL_DATA {
        let (out, _) = run("coxeter", d, 2, 0, 4);
        c.require_pass(&out, &label(d, 2, 0));
        c.expect(out.checks.len() >= 7, || format!("{:?}: only {} checks", d, out.checks.len()));
    }
    c.finish(2, "coxeter")
}

/// Criteria 3 and 6 read different checks of the same frobenius runs.
fn frobenius_and_characters() -> (bool, bool) {
    let mut c3 = Criterion::default();
    let mut c6 = Criterion::default();
    let mut total = Duration::ZERO;
    let (mut idempotents, mut vanishing) = (0, 0);
    for d in [A1_SC, A1_ADJ, A2_SC] {
        for q in [2, 3] {
            for p in [0, 2, 3] {
                let tag = label(d, q, p);
                let (out, t) = run("frobenius", d, q, p, 4);
                if p == 0 {
                    total += t;
                }
                let (chars, rest): (Vec<_>, Vec<_>) = out.checks.iter().partition(|ch| ch.name.contains("central idempotent"));
                c3.runs += 1;
                c6.runs += 1;
                c3.expect(out.error.is_none(), || format!("{tag}: {:?}", out.error));
                c3.expect(rest.iter().any(|ch| ch.name.contains("reconstructed")), || format!("{tag}: no functionals"));
                for ch in rest.iter().filter(|ch| !ch.passed) {
                    c3.problems.push(format!("{tag}: {}", ch.name));
                }
                c6.expect(!chars.is_empty(), || format!("{tag}: no character checks"));
                for ch in &chars {
                    let v = ch.certificate["vanishes"].as_bool().unwrap_or(false);
                    c6.expect(p != 0 || !v, || format!("{tag}: Poincare sum vanished over Q"));
                    c6.expect(ch.passed, || format!("{tag}: {} ({})", ch.name, ch.certificate["outcome"]));
                    if v {
                        vanishing += 1;
                    } else {
                        idempotents += 1;
                    }
                }
            }
        }
    }
    c3.expect(total < FROBENIUS_BUDGET, || format!("{total:?} over budget over Q"));
    c3.facts.push(format!("{:.1} s over Q (budget {} s)", total.as_secs_f64(), FROBENIUS_BUDGET.as_secs()));
    c6.expect(vanishing > 0, || "the vanishing boundary was never reached".into());
    c6.facts.push(format!("{idempotents} idempotents verified, {vanishing} PoincareVanishes"));
    (c3.finish(3, "frobenius"), c6.finish(6, "character idempotents"))
}

fn resolution() -> bool {
    let mut c = Criterion::default();
    let mut a2 = Duration::ZERO;
    let mut controls = 0;
    for (d, n) in [(A1_SC, 6), (A1_ADJ, 6), (A2_SC, 4)] {
        for q in [2, 3] {
            for p in [2, 3, 0] {
                let tag = label(d, q, p);
                let (out, t) = run("resolution", d, q, p, n);
                c.require_pass(&out, &tag);
                c.expect(has_check(&out, &format!("F_{n}: exact")), || format!("{tag}: F_{n} not reached"));
                c.expect(has_check(&out, "d^2 = 0") && has_check(&out, "augmentation"), || format!("{tag}: d^2 or augmentation"));
                if p != 2 {
                    c.expect(has_check(&out, "negative control"), || format!("{tag}: negative control missing"));
                    controls += 1;
                }
                if d == A2_SC {
                    a2 = a2.max(t);
                }
            }
        }
    }
    c.expect(a2 < A2_RESOLUTION_BUDGET, || format!("A2 resolution took {a2:?}"));
    c.facts.push(format!("{controls} negative controls"));
    c.facts.push(format!("slowest A2 {:.1} s (budget {} s)", a2.as_secs_f64(), A2_RESOLUTION_BUDGET.as_secs()));
    c.finish(4, "resolution")
}

fn duality() -> bool {
    let mut c = Criterion::default();
    let mut two_dim = 0;
    for d in [A1_SC, A1_ADJ, A2_SC, A2_ADJ] {
        for q in [2, 3] {
            for p in [3, 5, 0] {
                let tag = label(d, q, p);
                let (out, _) = run("duality", d, q, p, 8);
                c.require_pass(&out, &tag);
                for m in ["trivial", "sign"] {
                    c.expect(has_check(&out, &format!("{m}: Ext^d")), || format!("{tag}: {m} ext_top missing"));
                }
                two_dim += out.checks.iter().filter(|ch| ch.passed && ch.name.starts_with("two-dimensional") && ch.name.contains("= 0")).count();
            }
        }
    }
    c.expect(two_dim > 0, || "no two-dimensional module was tested".into());
    c.facts.push(format!("{two_dim} vanishing checks on two-dimensional modules"));
    c.finish(5, "duality")
}

fn graded() -> bool {
    let mut c = Criterion::default();
    for d in ALL_DATA {
        for q in [2, 3] {
            for p in [2, 3, 0] {
                let tag = label(d, q, p);
                let (out, _) = run("graded", d, q, p, 4);
                c.require_pass(&out, &tag);
                c.expect(has_check(&out, "gr of the resolution exact"), || format!("{tag}: graded exactness missing"));
            }
        }
    }
    c.finish(7, "graded")
}

fn section7() -> bool {
    let mut c = Criterion::default();
    let expected: [(u64, &[&str]); 3] = [
        (2, &["SL2, q = 2: H has global dimension 1", "PGL2, q = 2: there exists a simple H-module", "radical agrees with the oracle"]),
        (3, &["PGL2, q = 3: H' has global dimension 1", "nonzero square-zero element", "radical agrees with the oracle"]),
        (5, &["PGL2, q = 5: H' has global dimension 1"]),
    ];
    for (p, needles) in expected {
        for d in [A1_SC, A1_ADJ, A2_SC] {
            let tag = label(d, p, p);
            let (out, _) = run("section7", d, p, p, 4);
            c.require_pass(&out, &tag);
            for n in needles {
                c.expect(has_check(&out, n), || format!("{tag}: missing `{n}`"));
            }
        }
    }
    let (out, _) = run("section7", A1_SC, 2, 0, 4);
    c.expect(matches!(out.verdict, Verdict::Skipped { .. }), || "characteristic 0 was not skipped".into());
    c.finish(8, "section 7 examples")
}

#[test]
fn acceptance() {
    let c1 = relations();
    let c2 = coxeter();
    let (c3, c6) = frobenius_and_characters();
    let c4 = resolution();
    let c5 = duality();
    let c7 = graded();
    let c8 = section7();
    let all = [c1, c2, c3, c4, c5, c6, c7, c8];
    assert!(all.iter().all(|&x| x), "acceptance criteria failed: {all:?}");
}
