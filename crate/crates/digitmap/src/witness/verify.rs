//! Replay verification: every claimed equality and congruence in a trace is
//! recomputed from primitives. Failures are report entries, never panics.

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use serde::Serialize;

use crate::nt;
use crate::sparse::{Run, SparseNumber};

use super::{
    pair::shifted_sum, PairTrace, PreimageTrace, RunTrace, ShiftAllTrace, ShiftTrace, Strategy,
    Witness, WitnessContext, WitnessTrace,
};

#[derive(Clone, Debug, Serialize)]
pub struct VerifyCheck {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

#[derive(Clone, Debug, Serialize, Default)]
pub struct VerificationReport {
    pub checks: Vec<VerifyCheck>,
}

impl VerificationReport {
    pub fn ok(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    fn push(&mut self, name: &str, pass: bool, detail: impl Into<String>) {
        self.checks.push(VerifyCheck {
            name: name.into(),
            pass,
            detail: detail.into(),
        });
    }

}

pub fn verify_witness(ctx: &WitnessContext, trace: &WitnessTrace) -> VerificationReport {
    let mut report = VerificationReport::default();
    match trace {
        WitnessTrace::Shift(t) => verify_shift(ctx, t, &mut report),
        WitnessTrace::Preimage(t) => verify_preimage(ctx, t, &mut report),
        WitnessTrace::Pair(t) => verify_pair(ctx, t, &mut report),
        WitnessTrace::ShiftAll(t) => verify_shift_all(ctx, t, &mut report),
        WitnessTrace::Run(t) => verify_run(ctx, t, &mut report),
    }
    report
}

fn verify_shift(ctx: &WitnessContext, t: &ShiftTrace, report: &mut VerificationReport) {
    let map = ctx.atlas.map();
    if map.base() != t.base {
        report.push("base", false, "trace base differs from atlas base");
        return;
    }
    // the block must clear the additand's digits so f splits additively
    let clear = t
        .witness
        .runs()
        .first()
        .map(|r| r.start >= BigUint::from(map.digit_count(t.m)))
        .unwrap_or(false);
    report.push(
        "digits-clear",
        clear,
        format!("lowest 1-digit sits above the digits of m = {}", t.m),
    );
    let f_l = match t.witness.f_eval(map) {
        Ok(v) => v,
        Err(e) => {
            report.push("f-eval", false, e.to_string());
            return;
        }
    };
    // f^r(l) = x
    let mut v = f_l.clone();
    for _ in 1..t.r {
        v = map.eval_big(&v);
    }
    report.push(
        "iterated-value",
        v == BigUint::from(t.x),
        format!("f^{}(l) = {v}, expected {}", t.r, t.x),
    );
    let mut all = true;
    for y in 1..=t.m {
        let mut v = &f_l + map.eval(y);
        for _ in 1..t.r {
            v = map.eval_big(&v);
        }
        if v != BigUint::from(t.x + map.iterate(y, t.r)) {
            all = false;
            report.push(
                "shift-identity",
                false,
                format!("f^{}(l+{y}) != {} + f^{}({y})", t.r, t.x, t.r),
            );
            break;
        }
    }
    if all {
        report.push(
            "shift-identity",
            true,
            format!("f^{}(l+y) = {} + f^{}(y) for all y <= {}", t.r, t.x, t.r, t.m),
        );
    }
}

fn verify_preimage(ctx: &WitnessContext, t: &PreimageTrace, report: &mut VerificationReport) {
    let atlas = ctx.atlas;
    let q = t.modulus;
    let h_class = match atlas.classify_big(&t.h, t.u) {
        Ok(c) => c,
        Err(e) => {
            report.push("anchor", false, e.to_string());
            return;
        }
    };
    report.push("anchor-u-integer", h_class.is_u_integer, format!("h = {}", t.h));
    let target = h_class.phase;
    match &t.witness {
        Witness::Dense(n) => {
            report.push("residue", n % q == BigUint::from(t.a), format!("{n} mod {q}"));
            match atlas.classify_big(n, t.u) {
                Ok(c) => {
                    report.push("u-integer", c.is_u_integer, format!("{n}"));
                    report.push(
                        "concurrent",
                        c.is_u_integer && c.phase == target,
                        format!("phase {:?} vs {:?}", c.phase, target),
                    );
                }
                Err(e) => report.push("u-integer", false, e.to_string()),
            }
        }
        Witness::Sparse(l2) => {
            let Some(cons) = &t.construct else {
                report.push("trace", false, "sparse witness without construction data");
                return;
            };
            report.push(
                "residue",
                l2.residue(q).ok() == Some(t.a),
                format!("residue(l2, {q}) vs a = {}", t.a),
            );
            report.push(
                "exact-preimage",
                l2.f_eval(atlas.map()).ok().as_ref() == Some(&cons.l1),
                "f(l2) = l1",
            );
            report.push(
                "congruence-solution",
                cons.r < q && cons.ones_count >= BigUint::one(),
                format!("r = {} < {q}, ones = {}", cons.r, cons.ones_count),
            );
            report.push(
                "seed-large-enough",
                cons.l1 > BigUint::from(q) * cons.f_m_star,
                "l1 > f(b-1) f(m*)",
            );
            match atlas.classify_big(&cons.l1, t.u) {
                Ok(c) => {
                    report.push("seed-u-integer", c.is_u_integer, format!("l1 = {}", cons.l1));
                    let phase_l2 = c.phase.map(|p| (p + 1) % h_class.cycle_len);
                    report.push(
                        "concurrent",
                        c.is_u_integer && phase_l2 == target,
                        format!("phase(l2) {:?} vs {:?}", phase_l2, target),
                    );
                }
                Err(e) => report.push("seed-u-integer", false, e.to_string()),
            }
        }
        Witness::Deep(d) => {
            let Some(cons) = &t.construct else {
                report.push("trace", false, "deep witness without construction data");
                return;
            };
            report.push(
                "layer-residue",
                d.base_witness.residue(q).ok() == Some(d.residue) && d.residue == t.a,
                format!("declared residue {}", d.residue),
            );
            report.push(
                "exact-preimage",
                d.base_witness.f_eval(atlas.map()).ok().as_ref() == Some(&cons.l1),
                "f(layer 2) = l1",
            );
            report.push(
                "order",
                nt::multiplicative_order(atlas.map().base() % q, q) == Some(d.order),
                format!("d = {}", d.order),
            );
            report.push("layer-count", d.level > d.concrete_level, "symbolic layers exist");
            // every symbolic layer is value-of-previous 1-digits at
            // exponents d, 2d, ...: f drops exactly one layer and the
            // residue propagates since b^d = 1 mod q
            match atlas.classify_big(&cons.l1, t.u) {
                Ok(c) if c.is_u_integer => {
                    let phase = c
                        .phase
                        .map(|p| (p + (d.level - 1)) % d.cycle_len);
                    report.push(
                        "phase-arithmetic",
                        phase == Some(d.phase) && Some(d.phase) == target,
                        format!("layer {} phase {:?}", d.level, phase),
                    );
                }
                _ => report.push("seed-u-integer", false, "l1 is not a u-integer"),
            }
        }
    }
}

fn verify_pair(ctx: &WitnessContext, t: &PairTrace, report: &mut VerificationReport) {
    let atlas = ctx.atlas;
    let map = atlas.map();
    let b = map.base();
    let q = t.modulus;
    match (&t.witness, &t.construct) {
        (Witness::Dense(l), _) => {
            let Some(l) = l.to_u64() else {
                report.push("dense-range", false, "dense witness exceeds u64");
                return;
            };
            match atlas.are_concurrent(l, l + t.x, t.u) {
                Ok(ok) => report.push(
                    "concurrent",
                    ok,
                    format!("{l} and {} concurrently {}-integers", l + t.x, t.u),
                ),
                Err(e) => report.push("concurrent", false, e.to_string()),
            }
        }
        (Witness::Sparse(l), Some(c)) => {
            // geometry of the proof chain
            let mut s = 0u64;
            let mut pow = 1u128;
            while pow <= t.x as u128 {
                pow *= b as u128;
                s += 1;
            }
            report.push("s-minimal", s == c.s, format!("s = {s}"));
            report.push(
                "x1",
                c.x1 as u128 == pow - t.x as u128 && map.eval(c.x1) == c.f_x1,
                format!("x1 = {}", c.x1),
            );
            report.push(
                "h-residue",
                (&c.h % q) == BigUint::from(c.f_x1 % q),
                "h = f(x1) mod f(b-1)",
            );
            report.push(
                "h-large",
                c.h > BigUint::from(c.f_x1) + c.m_max,
                "h > f(x1) + M",
            );
            for a in &c.anchors {
                let cls = atlas.classify(a.l_v, t.u);
                let v_cls = atlas.classify(a.v, t.u);
                let ok = match (&cls, &v_cls) {
                    (Ok(x), Ok(v)) => {
                        x.is_u_integer && a.l_v % q == 1 % q && x.phase == v.phase
                    }
                    _ => false,
                };
                report.push("anchor", ok, format!("l_{{{}}} = {}", a.v, a.l_v));
            }
            let hp = atlas.classify_big(&c.h, t.u);
            let np = atlas.classify_big(&c.n_value, t.u);
            let concurrent = match (&hp, &np) {
                (Ok(h), Ok(n)) => h.is_u_integer && n.is_u_integer && h.phase == n.phase,
                _ => false,
            };
            report.push("h-n-concurrent", concurrent, "h and N share a phase");
            report.push(
                "t-large",
                c.t >= BigUint::from(c.s) + &c.h / q + 2u32,
                "b^t > b^(s + floor(h/q) + 1)",
            );
            // rebuild x2 and l from the recorded parameters
            let x2 = rebuild_x2(b, c.x1, &c.t, &c.n_value);
            report.push("x2-shape", x2.as_ref() == Some(&c.x2), "x2 matches its recipe");
            report.push(
                "f-x2",
                c.x2.f_eval(map).ok()
                    == Some(BigUint::from(c.f_x1) + &c.n_value - 1u32),
                "f(x2) = f(x1) + (N - 1)",
            );
            let l_rebuilt = x2.and_then(|x2| {
                SparseNumber::new(
                    b,
                    vec![Run {
                        start: BigUint::from(c.s),
                        stride: BigUint::one(),
                        count: c.k.clone(),
                        digit: b - 1,
                    }],
                )
                .ok()
                .and_then(|run| x2.add_disjoint(&run).ok())
            });
            report.push("l-shape", l_rebuilt.as_ref() == Some(l), "l matches its recipe");
            report.push(
                "k-decomposition",
                &BigUint::from(q) * &c.k + c.x2.f_eval(map).unwrap_or_default() == c.h
                    && !c.k.is_zero()
                    && BigUint::from(c.s) + &c.k < c.t,
                "h = f(b-1) k + f(x2), 1 <= k < t - s",
            );
            report.push(
                "f-l",
                l.f_eval(map).ok() == Some(c.h.clone()),
                "f(l) = h",
            );
            match shifted_sum(c, b) {
                Ok(lx) => {
                    report.push(
                        "f-l-plus-x",
                        lx.f_eval(map).ok() == Some(c.n_value.clone()),
                        "f(l + x) = N",
                    );
                    // value identity l + x = carried form
                    let ok = match l.to_dense(ctx.config.dense_digit_limit) {
                        Ok(dense) => {
                            lx.to_dense(ctx.config.dense_digit_limit).ok()
                                == Some(dense + t.x)
                        }
                        Err(_) => residue_probes(b).iter().all(|&p| {
                            match (l.residue(p), lx.residue(p)) {
                                (Ok(a), Ok(bb)) => (a + t.x % p) % p == bb,
                                _ => false,
                            }
                        }),
                    };
                    report.push("value-identity", ok, "l + x equals its carried digit form");
                }
                Err(e) => report.push("f-l-plus-x", false, e.to_string()),
            }
        }
        _ => report.push("trace", false, "witness form does not match strategy data"),
    }
}

/// Fixed probe moduli for value identities on non-densifiable numbers.
fn residue_probes(base: u64) -> Vec<u64> {
    [999999937u64, 998244353, 1000000007, 2147483647]
        .iter()
        .copied()
        .filter(|&p| nt::gcd(base % p, p) == 1)
        .collect()
}

fn rebuild_x2(b: u64, x1: u64, t: &BigUint, n_value: &BigUint) -> Option<SparseNumber> {
    let mut x2 = SparseNumber::from_u64(b, x1).ok()?;
    if n_value > &BigUint::one() {
        x2 = x2
            .add_disjoint(
                &SparseNumber::new(
                    b,
                    vec![Run {
                        start: t + 1u32,
                        stride: BigUint::one(),
                        count: n_value - 1u32,
                        digit: 1,
                    }],
                )
                .ok()?,
            )
            .ok()?;
    }
    Some(x2)
}

fn verify_shift_all(ctx: &WitnessContext, t: &ShiftAllTrace, report: &mut VerificationReport) {
    let atlas = ctx.atlas;
    let d = atlas.attractor_set();
    let covered: Vec<u64> = t.certificates.iter().map(|c| c.x).collect();
    report.push(
        "coverage",
        covered == d,
        format!("certificates cover D = {d:?}"),
    );
    let Some(h) = t.witness.dense_value(ctx.config.dense_digit_limit) else {
        report.push("h-value", false, "h is not densifiable");
        return;
    };
    for cert in &t.certificates {
        let value = &h + cert.x;
        let ok = value == cert.value
            && matches!(
                atlas.classify_big(&value, t.u),
                Ok(c) if c.is_u_integer && c.steps_to_u == Some(cert.steps_to_u)
            );
        report.push("offset", ok, format!("h + {} is a {}-integer", cert.x, t.u));
    }
}

fn verify_run(ctx: &WitnessContext, t: &RunTrace, report: &mut VerificationReport) {
    let atlas = ctx.atlas;
    let map = atlas.map();
    match &t.witness {
        Witness::Dense(l) => {
            for offset in 1..=t.n {
                let v = l + offset;
                let ok = matches!(atlas.classify_big(&v, t.u), Ok(c) if c.is_u_integer);
                report.push("member", ok, format!("l + {offset} is a {}-integer", t.u));
            }
        }
        Witness::Sparse(l) => {
            let (Some(r), Some(h)) = (t.r, &t.h) else {
                report.push("trace", false, "sparse run witness without lift data");
                return;
            };
            let Some(h_value) = h.dense_value(ctx.config.dense_digit_limit) else {
                report.push("h-value", false, "h is not densifiable");
                return;
            };
            let f_l = match l.f_eval(map) {
                Ok(v) => v,
                Err(e) => {
                    report.push("f-eval", false, e.to_string());
                    return;
                }
            };
            for offset in 1..=t.n {
                let mut v = &f_l + map.eval(offset);
                for _ in 1..r {
                    v = map.eval_big(&v);
                }
                let expected = &h_value + map.iterate(offset, r);
                let ok = v == expected
                    && matches!(atlas.classify_big(&v, t.u), Ok(c) if c.is_u_integer);
                report.push(
                    "member",
                    ok,
                    format!("f^{r}(l + {offset}) lands on a {}-integer", t.u),
                );
            }
        }
        Witness::Deep(_) => {
            report.push("trace", false, "deep witnesses do not arise for runs");
        }
    }
    if t.strategy == Strategy::Search {
        report.push(
            "strategy",
            t.verified.iter().all(|c| c.ok),
            "recorded per-offset checks all passed",
        );
    }
}
