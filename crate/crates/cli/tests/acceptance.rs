//! The twelve acceptance criteria, each run at its stated size and time budget.
//!
//! One line per criterion is written straight to standard error, so it shows up
//! even when the harness captures output.

use std::collections::HashSet;
use std::io::Write;
use std::process::{Command, Stdio};
use std::time::{Duration, Instant};

use dphelix::connector::{connect, ConnectError, Limits};
use dphelix::corpus;
use dphelix::delpezzo::{
    affine_roots, finite_roots, orthogonal_compose, orthogonal_decompose, reflection_matrix, tensor_matrix,
    weyl_closure, OrthogonalElement, Surface, DEFAULT_WEYL_LIMIT,
};
use dphelix::helix::{find_good_thread, is_good, replay, rotate_thread, seed_of, tilt_plus, Collection, Trace};
use dphelix::lattice::{
    canonical_polygon, delta_class, intersection_form, is_q_painleve, kernel_basis, kernel_gram, predicted_edges,
    t_polygon, Ambient, Certificate, Polygon, Seed, Sign,
};
use dphelix::matrix::Matrix;
use dphelix::toric::{complete_fan, oracle_check, toric_self_intersection, ToricNS};
use num_integer::Integer;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_dphelix"))
}

fn run_bin(args: &[&str], stdin: Option<&str>) -> (i32, String, String) {
    let mut child = bin()
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .expect("binary runs");
    if let Some(text) = stdin {
        child.stdin.take().unwrap().write_all(text.as_bytes()).unwrap();
    }
    drop(child.stdin.take());
    let out = child.wait_with_output().unwrap();
    (
        out.status.code().unwrap_or(-1),
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
    )
}

fn corpus_collections() -> Vec<(&'static str, Collection<i64>)> {
    corpus::entries::<i64>().unwrap().into_iter().map(|e| (e.name, e.collection)).collect()
}

/// Collections reached from `c` by at most `depth` tilts, each after the rotation making it good.
fn tilt_closure(c: &Collection<i64>, depth: usize) -> Vec<Collection<i64>> {
    let mut seen: HashSet<Collection<i64>> = HashSet::from([c.clone()]);
    let mut all = vec![c.clone()];
    let mut frontier = vec![c.clone()];
    for _ in 0..depth {
        let mut next = Vec::new();
        for x in &frontier {
            for j in 1..=x.n() {
                let Ok((r, _, p)) = find_good_thread(x, j) else { continue };
                let y = tilt_plus(&r, p).unwrap();
                if seen.insert(y.clone()) {
                    all.push(y.clone());
                    next.push(y);
                }
            }
        }
        frontier = next;
    }
    all
}

fn random_primitive(rng: &mut impl Rng, bound: i64) -> [i64; 2] {
    loop {
        let v = [rng.gen_range(-bound..=bound), rng.gen_range(-bound..=bound)];
        if v[0].gcd(&v[1]) == 1 {
            return v;
        }
    }
}

/// A random seed with `n ≤ 8` and all entries of ψ and the basis bounded by 10.
fn random_seed(rng: &mut impl Rng) -> Seed<i64> {
    loop {
        let n = rng.gen_range(3..=8);
        let images: Vec<Vec<i64>> = (0..n).map(|_| random_primitive(rng, 10).to_vec()).collect();
        let Ok(ambient) = Ambient::new(Matrix::from_cols(&images).unwrap()) else { continue };
        let mut basis = Matrix::identity(n);
        for _ in 0..rng.gen_range(0..4) {
            let (a, b) = (rng.gen_range(0..n), rng.gen_range(0..n));
            if a != b {
                basis.add_col_multiple(a, b, rng.gen_range(-2..=2));
            }
        }
        if basis.to_rows().iter().flatten().any(|x: &i64| x.abs() > 10) {
            continue;
        }
        if let Ok(s) = Seed::new(ambient, basis) {
            return s;
        }
    }
}

/// Independent half-plane construction: the polygon `{x : det(u, x) ≤ c}` over the
/// distinct ψ-images `u` with their δ-coefficients `c`, by exact line intersection.
fn half_plane_polygon(s: &Seed<i64>) -> Option<Vec<[i64; 2]>> {
    let delta = delta_class(s).ok()?;
    let mut lines: Vec<([i64; 2], i64)> = Vec::new();
    for (u, &c) in s.psi_images().iter().zip(&delta.coefficients) {
        if !lines.iter().any(|(v, _)| v == u) {
            lines.push((*u, c));
        }
    }
    let angle = |u: [i64; 2]| (u[1] as f64).atan2(u[0] as f64);
    lines.sort_by(|a, b| angle(a.0).partial_cmp(&angle(b.0)).unwrap());
    let m = lines.len();
    let mut vertices = Vec::new();
    for i in 0..m {
        // corner between consecutive lines det(u, x) = c and det(v, x) = d
        let ((u, c), (v, d)) = (lines[i], lines[(i + 1) % m]);
        // det(u, x) = u0 x1 − u1 x0, so solve [[−u1, u0], [−v1, v0]] x = (c, d)
        let det = -u[1] * v[0] + u[0] * v[1];
        if det == 0 {
            return None;
        }
        let x0 = c * v[0] - u[0] * d;
        let x1 = -u[1] * d + v[1] * c;
        if x0 % det != 0 || x1 % det != 0 {
            return None;
        }
        vertices.push([x0 / det, x1 / det]);
    }
    for p in &vertices {
        for (u, c) in &lines {
            if u[0] * p[1] - u[1] * p[0] > *c {
                return None;
            }
        }
    }
    vertices.dedup();
    Some(vertices)
}

fn criterion_1() -> Outcome {
    let (code, shown, _) = run_bin(&["corpus", "show", "p1xp1-bs"], None);
    ensure(code == 0, || format!("corpus show exited {code}"))?;
    let (code, out, err) = run_bin(&["collection", "dual"], Some(&shown));
    ensure(code == 0, || format!("collection dual exited {code}: {err}"))?;
    let v: serde_json::Value = serde_json::from_str(&out).map_err(|e| e.to_string())?;
    let psi: Vec<[i64; 2]> = serde_json::from_value(v["psi"].clone()).map_err(|e| e.to_string())?;
    let expected = vec![[1, 0], [-1, 2], [-1, 2], [1, -4]];
    ensure(psi == expected, || format!("got {psi:?}"))?;
    Ok(format!("ψ-vectors {psi:?}"))
}

fn criterion_2() -> Outcome {
    let entries = corpus_collections();
    for (name, c) in &entries {
        let d = delta_class(&seed_of(c).unwrap()).map_err(|e| format!("{name}: {e}"))?;
        let ranks: Vec<i64> = c.objects.iter().map(|e| e.r).collect();
        ensure(d.coefficients == ranks, || format!("{name}: δ-coefficients {:?} vs ranks {ranks:?}", d.coefficients))?;
    }
    Ok(format!("{} corpus collections", entries.len()))
}

fn criterion_3() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut checks = 0;
    for _ in 0..1000 {
        let s = random_seed(&mut rng);
        for j in 1..=s.rank() {
            for e in [Sign::Plus, Sign::Minus] {
                let once = s.mutate(j, e).unwrap();
                ensure(once.mutate(j, e.flip()).unwrap().basis() == s.basis(), || format!("involution fails at j={j}"))?;
                ensure(once.mutate(j, e).unwrap().basis() == s.apply_t(j, e).unwrap().basis(), || {
                    format!("double mutation differs from T at j={j}")
                })?;
                checks += 2;
            }
        }
    }
    Ok(format!("1000 seeds, {checks} identities"))
}

fn criterion_4() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut words = 0;
    for (name, c) in corpus_collections() {
        let s = seed_of(&c).unwrap();
        let kb = kernel_basis(s.ambient());
        let gram = kernel_gram(&s, &kb);
        for _ in 0..200 {
            let mut t = s.clone();
            for _ in 0..rng.gen_range(0..=6) {
                let e = if rng.gen() { Sign::Plus } else { Sign::Minus };
                t = t.mutate(rng.gen_range(1..=t.rank()), e).unwrap();
            }
            for (p, a) in kb.vectors.iter().enumerate() {
                for (q, b) in kb.vectors.iter().enumerate() {
                    let v = intersection_form(&t, a, b).map_err(|e| e.to_string())?;
                    ensure(v == gram[(p, q)], || format!("{name}: form changed at ({p}, {q})"))?;
                }
            }
            words += 1;
        }
    }
    Ok(format!("{words} mutation words"))
}

fn criterion_5() -> Outcome {
    for (name, c) in corpus_collections() {
        let report = oracle_check(&seed_of(&c).unwrap()).map_err(|e| format!("{name}: {e}"))?;
        ensure(report.passed, || format!("{name}: {} failed comparisons", report.failures().count()))?;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut done = 0;
    while done < 500 {
        let vs: Vec<[i64; 2]> = (0..rng.gen_range(1..=4)).map(|_| random_primitive(&mut rng, 3)).collect();
        let fan = complete_fan(&vs).map_err(|e| e.to_string())?;
        if fan.rays.len() > 12 {
            continue;
        }
        let ns = ToricNS::new(fan.clone());
        let rows = vec![fan.rays.iter().map(|u| u[0]).collect(), fan.rays.iter().map(|u| u[1]).collect()];
        let relations = Matrix::from_rows(rows).unwrap().integer_kernel();
        let mut alpha = vec![0i64; fan.rays.len()];
        for r in &relations {
            let k = rng.gen_range(-4..=4);
            for (a, x) in alpha.iter_mut().zip(r) {
                *a += k * x;
            }
        }
        let lhs = toric_self_intersection(&ns, &alpha).map_err(|e| e.to_string())?;
        let rhs = ns.pairing(&alpha, &alpha).map_err(|e| e.to_string())?;
        ensure(lhs == rhs, || format!("C² = {lhs} vs {rhs} on {:?}", fan.rays))?;
        done += 1;
    }
    Ok("corpus seeds and 500 random classes".into())
}

fn reachable_seeds(depth: usize) -> Vec<(String, Seed<i64>)> {
    let mut out = Vec::new();
    for (name, c) in corpus_collections() {
        for x in tilt_closure(&c, depth) {
            out.push((name.to_string(), seed_of(&x).unwrap()));
        }
    }
    out
}

fn criterion_6() -> Outcome {
    let seeds = reachable_seeds(4);
    for (name, s) in &seeds {
        let q = is_q_painleve(s);
        ensure(q.q_painleve, || format!("{name}: not q-Painlevé"))?;
        let Certificate::Radical(v) = &q.certificate else {
            return Err(format!("{name}: certificate is not a radical vector"));
        };
        ensure(v.iter().any(|x| *x != 0) && s.ambient().in_kernel(v), || format!("{name}: radical not in Ker ψ"))?;
        for b in kernel_basis(s.ambient()).vectors {
            ensure(intersection_form(s, v, &b).unwrap() == 0, || format!("{name}: radical pairs nontrivially"))?;
        }
    }
    Ok(format!("{} seeds within 4 tilts", seeds.len()))
}

fn criterion_7() -> Outcome {
    let seeds = reachable_seeds(4);
    for (name, s) in &seeds {
        let p = t_polygon(s).map_err(|e| format!("{name}: {e}"))?;
        ensure(p.is_t_polygon(), || format!("{name}: not a T-polygon"))?;
        let mut edges = p.edges();
        edges.sort();
        ensure(edges == predicted_edges(s).unwrap(), || format!("{name}: edge dictionary fails"))?;
        let oracle = half_plane_polygon(s).ok_or_else(|| format!("{name}: half-plane oracle failed"))?;
        let oracle = Polygon::new(oracle).map_err(|e| format!("{name}: {e}"))?;
        ensure(canonical_polygon(&oracle) == canonical_polygon(&p), || format!("{name}: oracle polygon differs"))?;
    }
    let bs = seed_of(&corpus::get::<i64>("p1xp1-bs").unwrap()).unwrap();
    let expected = Polygon::new(vec![[1, -3], [0, 1], [-1, 1]]).unwrap();
    let expected_from_half_planes = Polygon::new(half_plane_polygon(&bs).unwrap()).unwrap();
    ensure(canonical_polygon(&t_polygon(&bs).unwrap()) == canonical_polygon(&expected), || "P1xP1 polygon differs".into())?;
    ensure(canonical_polygon(&expected_from_half_planes) == canonical_polygon(&expected), || {
        "half-plane oracle disagrees on P1xP1".into()
    })?;
    Ok(format!("{} seeds; P1xP1 polygon matches", seeds.len()))
}

fn criterion_8() -> Outcome {
    let mut checked = 0;
    for (name, c) in corpus_collections() {
        for x in tilt_closure(&c, 3) {
            for k in 0..x.n() as i64 {
                let y = rotate_thread(&x, k);
                let sy = seed_of(&y).unwrap();
                for j in 2..=y.n() {
                    if !is_good(&y, j) {
                        continue;
                    }
                    let lhs = seed_of(&tilt_plus(&y, j).unwrap()).unwrap();
                    ensure(lhs.same_seed(&sy.mutate(j, Sign::Plus).unwrap()), || format!("{name}: square fails at j={j}"))?;
                    checked += 1;
                }
            }
        }
    }
    Ok(format!("{checked} good pairs"))
}

fn criterion_9() -> Outcome {
    let cases = [
        (Surface::BlowupP2 { m: 0 }, 1),
        (Surface::BlowupP2 { m: 1 }, 1),
        (Surface::P1xP1, 2),
        (Surface::BlowupP2 { m: 2 }, 2),
        (Surface::BlowupP2 { m: 3 }, 12),
        (Surface::BlowupP2 { m: 4 }, 120),
        (Surface::BlowupP2 { m: 5 }, 1920),
    ];
    let mut orders = Vec::new();
    for (s, expected) in cases {
        let order = weyl_closure::<i64>(&s, DEFAULT_WEYL_LIMIT).map_err(|e| e.to_string())?.order();
        ensure(order == expected, || format!("{s}: order {order}, expected {expected}"))?;
        orders.push(format!("{s}:{order}"));
    }
    Ok(orders.join(" "))
}

fn criterion_10() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    for s in [Surface::BlowupP2 { m: 0 }, Surface::P1xP1, Surface::BlowupP2 { m: 2 }, Surface::BlowupP2 { m: 3 }] {
        let finite = finite_roots::<i64>(&s);
        let affine = affine_roots::<i64>(&s, 2);
        let gk = s.intersection_matrix::<i64>().mul_vec(&s.canonical());
        let k_perp = Matrix::from_rows(vec![gk]).unwrap().integer_kernel();
        for _ in 0..200 {
            let mut f = Matrix::identity(s.n());
            for _ in 0..rng.gen_range(0..=6) {
                let g = match rng.gen_range(0..3) {
                    0 if !finite.is_empty() => reflection_matrix(&s, &finite[rng.gen_range(0..finite.len())]).unwrap(),
                    1 if !affine.is_empty() => reflection_matrix(&s, &affine[rng.gen_range(0..affine.len())]).unwrap(),
                    _ => {
                        let mut d = vec![0i64; s.rho()];
                        for b in &k_perp {
                            let k = rng.gen_range(-2..=2);
                            for (x, y) in d.iter_mut().zip(b) {
                                *x += k * y;
                            }
                        }
                        tensor_matrix(&s, &d).unwrap()
                    }
                };
                f = f.mul(&g);
            }
            let (w, d) = orthogonal_decompose(&s, &OrthogonalElement { matrix: f.clone() }).map_err(|e| format!("{s}: {e}"))?;
            ensure(orthogonal_compose(&s, &w.matrix, &d).unwrap() == f, || format!("{s}: round trip fails"))?;
        }
    }
    Ok("200 products on each of P2, P1xP1, dP2, dP3".into())
}

fn criterion_11(budget: Duration) -> Outcome {
    let dir = std::env::temp_dir().join(format!("dphelix-acceptance-{}", std::process::id()));
    std::fs::create_dir_all(&dir).map_err(|e| e.to_string())?;
    let mut summary = Vec::new();
    for name in ["p2-beilinson", "p1xp1-bs", "dp1-lines", "dp2-lines", "dp3-lines"] {
        let mut pairs = 0;
        let mut seed = 0u64;
        let mut seen = HashSet::new();
        while pairs < 3 {
            seed += 1;
            ensure(seed < 100, || format!("{name}: could not draw three distinct pairs"))?;
            let len = (1 + seed % 6).to_string();
            let a_path = dir.join(format!("{name}-{seed}-a.json"));
            let b_path = dir.join(format!("{name}-{seed}-b.json"));
            for (path, s) in [(&a_path, seed * 2), (&b_path, seed * 2 + 1)] {
                let corpus_name = format!("corpus:{name}");
                let args = ["collection", "scramble", "--len", &len, "--seed", &s.to_string(), "--output", path.to_str().unwrap(), &corpus_name];
                let (code, _, err) = run_bin(&args, None);
                ensure(code == 0, || format!("{name}: scramble exited {code}: {err}"))?;
            }
            let a: Collection<i64> = serde_json::from_str(&std::fs::read_to_string(&a_path).unwrap()).unwrap();
            let b: Collection<i64> = serde_json::from_str(&std::fs::read_to_string(&b_path).unwrap()).unwrap();
            if a == b || !seen.insert((a.clone(), b.clone())) {
                continue;
            }
            let start = Instant::now();
            let (code, out, err) = run_bin(&["connect", a_path.to_str().unwrap(), b_path.to_str().unwrap()], None);
            let elapsed = start.elapsed();
            ensure(code == 0, || format!("{name} seed {seed}: connect exited {code}: {err}"))?;
            ensure(elapsed < budget, || format!("{name} seed {seed}: {elapsed:?} over budget"))?;
            let trace: Trace<i64> = serde_json::from_str(&out).map_err(|e| e.to_string())?;
            ensure(replay(&a, &trace).map_err(|e| e.to_string())? == b, || format!("{name} seed {seed}: replay differs"))?;
            pairs += 1;
        }
        summary.push(format!("{name}:{pairs}"));
    }
    let _ = std::fs::remove_dir_all(&dir);
    Ok(format!("verified pairs {}", summary.join(" ")))
}

fn criterion_12() -> Outcome {
    let (code, _, err) = run_bin(&["connect", "corpus:p2-beilinson", "corpus:p1xp1-bs"], None);
    ensure(code == 1, || format!("exit code {code}"))?;
    ensure(err.contains("rank of K(Z)"), || format!("invariant not named: {err}"))?;
    let p2 = corpus::get::<i64>("p2-beilinson").unwrap();
    let bs = corpus::get::<i64>("p1xp1-bs").unwrap();
    match connect(&p2, &bs, &Limits::default()) {
        Err(ConnectError::SurfaceMismatch { invariant, left, right }) => Ok(format!("rejected: {invariant} ({left} vs {right})")),
        other => Err(format!("unexpected result {other:?}")),
    }
}

#[test]
fn acceptance() {
    type Criterion = (&'static str, u64, Box<dyn Fn() -> Outcome>);
    let criteria: Vec<Criterion> = vec![
        ("dual ψ-vectors on the P1xP1 corpus", 1, Box::new(criterion_1)),
        ("δ-coefficients equal ranks", 1, Box::new(criterion_2)),
        ("mutation algebra on random seeds", 10, Box::new(criterion_3)),
        ("form invariance under mutation words", 30, Box::new(criterion_4)),
        ("toric oracle equivalence", 60, Box::new(criterion_5)),
        ("q-Painlevé certification within 4 tilts", 60, Box::new(criterion_6)),
        ("T-polygon axioms and edge dictionary", 10, Box::new(criterion_7)),
        ("tilt/mutation commutation within 3 tilts", 60, Box::new(criterion_8)),
        ("Weyl orders", 120, Box::new(criterion_9)),
        ("orthogonal decomposition round trip", 60, Box::new(criterion_10)),
        ("connect on scrambled pairs", 600, Box::new(|| criterion_11(Duration::from_secs(120)))),
        ("negative control", 1, Box::new(criterion_12)),
    ];
    let mut failed = Vec::new();
    let mut err = std::io::stderr();
    for (i, (title, budget, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let elapsed = start.elapsed();
        let over = elapsed > Duration::from_secs(*budget);
        let (status, detail) = match (&outcome, over) {
            (Ok(d), false) => ("PASS", d.clone()),
            (Ok(d), true) => ("FAIL", format!("{d}; over the time budget")),
            (Err(e), _) => ("FAIL", e.clone()),
        };
        writeln!(err, "acceptance {:>2} {status} [{:>8.3}s / {budget}s] {title}: {detail}", i + 1, elapsed.as_secs_f64())
            .unwrap();
        if status == "FAIL" {
            failed.push(i + 1);
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
