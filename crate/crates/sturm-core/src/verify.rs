//! Named verification suites over instance ranges, shared by the
//! command-line `verify` subcommand. Each suite runs a family of exact
//! checks and reports the instances covered and any failures.

use crate::cfrac;
use crate::connections::{
    connection_graph, find_reversor, full_relation, is_blocked, Scan, STAR,
};
use crate::error::Result;
use crate::invariants::{morse_indices, zero_numbers, Mode};
use crate::meander::Meander;
use crate::permutation::Permutation;
use crate::three_nose::{
    build_three_nose_meander, chafee_infante_lattice, chafee_infante_permutation,
    chafee_infante_stack, equilibrium_labels, insert_nest, label_swap, labeled_connection_graph,
    lattice_reversor, predicted_morse_counts, three_nose_permutation,
};

/// Outcome of one suite run.
#[derive(Clone, Debug)]
pub struct Report {
    pub suite: String,
    pub instances: usize,
    pub failures: Vec<String>,
}

impl Report {
    fn new(suite: &str) -> Report {
        Report {
            suite: suite.to_string(),
            instances: 0,
            failures: Vec::new(),
        }
    }

    fn check(&mut self, ok: bool, context: impl FnOnce() -> String) {
        self.instances += 1;
        if !ok {
            self.failures.push(context());
        }
    }

    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn summary(&self) -> String {
        if self.passed() {
            format!("{}: pass ({} checks)", self.suite, self.instances)
        } else {
            format!(
                "{}: FAIL ({} of {} checks failed)\n  {}",
                self.suite,
                self.failures.len(),
                self.instances,
                self.failures.join("\n  ")
            )
        }
    }
}

/// Transposition equivalence: the `(q, r)` permutation equals the rotated
/// inverse of the `(r, q)` permutation, and the label swap carries one
/// connection graph onto the other.
pub fn equivalence(max: usize) -> Report {
    let mut report = Report::new("equivalence");
    for r in 1..=max {
        for q in 1..=max {
            let lhs = three_nose_permutation(q, r);
            let rhs = three_nose_permutation(r, q).inverse().kappa();
            report.check(lhs == rhs, || format!("permutation identity at r={r}, q={q}"));
        }
    }
    let graph_max = max.min(6);
    for r in 1..=graph_max {
        for q in 1..=graph_max {
            if r * q <= 1 {
                continue;
            }
            let swap = label_swap(r, q);
            let from = match labeled_connection_graph(q, r, true) {
                Ok(g) => g,
                Err(e) => {
                    report.check(false, || format!("graph build failed at ({q},{r}): {e}"));
                    continue;
                }
            };
            let to = labeled_connection_graph(r, q, true).expect("mirror graph");
            let levels_ok = swap
                .iter()
                .all(|(&v, &w)| from.level(v) == to.level(w));
            let mapped: std::collections::BTreeSet<_> = from
                .all_edges()
                .map(|(u, v)| (swap[&u], swap[&v]))
                .collect();
            let target: std::collections::BTreeSet<_> = to.all_edges().collect();
            report.check(levels_ok && mapped == target, || {
                format!("label swap is not a graph equivalence at r={r}, q={q}")
            });
        }
    }
    report
}

/// Lattice description: the blocking-derived pointed connection graph of
/// the closed-form permutation equals the union of the two Chafee-Infante
/// stack decompositions, vertex for vertex and edge for edge; the Morse
/// counts match the plateau formula; and the attractor is a Sturm ball
/// with top vertex `B^r_q`.
pub fn lattice(rmax: usize, qmax: usize) -> Report {
    let mut report = Report::new("lattice");
    for r in 1..=rmax {
        for q in 1..=qmax {
            if r * q <= 1 {
                continue;
            }
            let wolfrum = labeled_connection_graph(r, q, true).expect("graph");
            let lattice = chafee_infante_lattice(r, q).expect("lattice");
            report.check(wolfrum == lattice, || format!("lattice mismatch at r={r}, q={q}"));

            let sigma = three_nose_permutation(r, q);
            let counts = crate::invariants::morse_polynomial(&sigma, false).expect("counts");
            report.check(counts == predicted_morse_counts(r, q), || {
                format!("Morse count mismatch at r={r}, q={q}")
            });

            let unpointed = labeled_connection_graph(r, q, false).expect("graph");
            let top_ok = unpointed.is_sturm_ball() && {
                let labels = equilibrium_labels(r, q);
                let top = labels
                    .meander_pos(&crate::three_nose::EquilibriumLabel::new(
                        crate::three_nose::Tag::B,
                        r,
                        q,
                    ))
                    .unwrap();
                unpointed.level(top) == (r + q) as i64
            };
            report.check(top_ok, || format!("Sturm ball check failed at r={r}, q={q}"));
        }
    }
    report
}

/// Time reversibility: the reversor search succeeds on every lattice in
/// range, the explicit subscript-complement involution is a valid witness,
/// and the Chafee-Infante stacks reverse by the index complement.
pub fn reversibility(rmax: usize, qmax: usize) -> Report {
    let mut report = Report::new("reversibility");
    for r in 1..=rmax {
        for q in 1..=qmax {
            if r * q <= 1 {
                continue;
            }
            let graph = labeled_connection_graph(r, q, true).expect("graph");
            let found = find_reversor(&graph);
            report.check(found.is_some(), || format!("no reversor found at r={r}, q={q}"));
            report.check(lattice_reversor(r, q).is_valid_for(&graph), || {
                format!("explicit reversor invalid at r={r}, q={q}")
            });
        }
    }
    for d in 1..=10 {
        let stack = chafee_infante_stack(d, true);
        report.check(find_reversor(&stack).is_some(), || {
            format!("no reversor on the height-{} stack", d + 1)
        });
    }
    report
}

fn suspension_bases(dmax: usize, rqmax: usize) -> Vec<Permutation> {
    let mut bases = Vec::new();
    for d in 1..=dmax {
        bases.push(chafee_infante_permutation(d));
    }
    for r in 1..=rqmax {
        for q in 1..=rqmax {
            if r * q > 1 {
                bases.push(three_nose_permutation(r, q));
            }
        }
    }
    bases
}

/// Suspension laws: index shift, zero-number shift, polar-sink relations,
/// and interior preservation of the heteroclinic relation, over the
/// Chafee-Infante and 3-nose families and their iterated suspensions.
pub fn suspension(dmax: usize, rqmax: usize, iterations: usize) -> Report {
    let mut report = Report::new("suspension");
    let mut instances = Vec::new();
    for base in suspension_bases(dmax, rqmax) {
        let mut sigma = base;
        for _ in 0..=iterations {
            instances.push(sigma.clone());
            sigma = sigma.suspend().expect("Sturm meanders stay dissipative");
        }
    }
    for sigma in &instances {
        let n = sigma.n();
        let lifted = sigma.suspend().expect("dissipative");
        let ok = check_suspension_laws(sigma, &lifted);
        report.check(ok.is_ok(), || {
            format!(
                "suspension law {} failed for N={} ({})",
                ok.unwrap_err(),
                n,
                sigma
            )
        });
    }
    report
}

/// All eight suspension laws for one Sturm meander; returns the number of
/// the first violated law.
pub fn check_suspension_laws(sigma: &Permutation, lifted: &Permutation) -> std::result::Result<(), String> {
    let n = sigma.n();
    if lifted.apply(1) != 1 || lifted.apply(n + 2) != n + 2 {
        return Err("(i)".into());
    }
    for j in 1..=n {
        if lifted.apply(j + 1) != n + 2 - sigma.apply(j) {
            return Err("(ii)".into());
        }
    }
    let iv = morse_indices(sigma).map_err(|e| e.to_string())?;
    let iv_lift = morse_indices(lifted).map_err(|e| e.to_string())?;
    if iv_lift.get(1) != 0 || iv_lift.get(n + 2) != 0 {
        return Err("(iii)".into());
    }
    for j in 1..=n {
        if iv_lift.get(lifted.apply(j + 1)) != iv.get(sigma.apply(j)) + 1 {
            return Err("(iv)".into());
        }
    }
    let z = zero_numbers(sigma, Mode::Strict).map_err(|e| e.to_string())?;
    let z_lift = zero_numbers(lifted, Mode::Strict).map_err(|e| e.to_string())?;
    for j in 1..=n {
        let v = lifted.apply(j + 1);
        if z_lift.get(v, 1) != 0 || z_lift.get(v, n + 2) != 0 {
            return Err("(v)".into());
        }
    }
    for j in 1..=n {
        for k in 1..=n {
            if j == k {
                continue;
            }
            let (vj, vk) = (lifted.apply(j + 1), lifted.apply(k + 1));
            if z_lift.get(vj, vk) != z.get(sigma.apply(j), sigma.apply(k)) + 1 {
                return Err("(vi)".into());
            }
        }
    }
    let rel = full_relation(sigma).map_err(|e| e.to_string())?;
    let rel_lift = full_relation(lifted).map_err(|e| e.to_string())?;
    for j in 1..=n {
        for k in 1..=n {
            if j == k {
                continue;
            }
            let interior = rel_lift.contains(&(lifted.apply(j + 1), lifted.apply(k + 1)));
            let base = rel.contains(&(sigma.apply(j), sigma.apply(k)));
            if interior != base {
                return Err("(vii)".into());
            }
        }
    }
    for j in 1..=n {
        let v = lifted.apply(j + 1);
        if !rel_lift.contains(&(v, 1)) || !rel_lift.contains(&(v, n + 2)) {
            return Err("(viii)".into());
        }
    }
    Ok(())
}

/// Cascading: the transitive closure of the graded connection graph equals
/// the full heteroclinic relation; checked together with the boundary
/// symmetry of the blocking scan.
pub fn cascading(set: &str) -> Report {
    let mut report = Report::new("cascading");
    let sigmas: Vec<Permutation> = match set {
        "table63" => cfrac::table_classes(63)
            .iter()
            .map(|cf| {
                cfrac::suspended_sturm_meander(cf)
                    .expect("table rows build")
                    .sigma()
                    .clone()
            })
            .collect(),
        _ => {
            let mut v = suspension_bases(10, 6);
            let suspended: Vec<Permutation> = v
                .iter()
                .map(|s| s.suspend().expect("dissipative"))
                .collect();
            v.extend(suspended);
            v
        }
    };
    for sigma in &sigmas {
        report.check(
            crate::connections::verify_cascading(sigma).unwrap_or(false),
            || format!("cascading failed for {sigma}"),
        );
        report.check(blocking_scans_agree(sigma), || {
            format!("blocking scan orders disagree for {sigma}")
        });
    }
    report
}

/// The blocking verdict must not depend on which boundary order the
/// between-scan walks.
pub fn blocking_scans_agree(sigma: &Permutation) -> bool {
    let Ok(z) = zero_numbers(sigma, Mode::Strict) else {
        return false;
    };
    let n = sigma.n();
    for v1 in 1..=n {
        for v2 in 1..=n {
            if v1 != v2
                && is_blocked(sigma, &z, v1, v2, Scan::Meander)
                    != is_blocked(sigma, &z, v1, v2, Scan::Axis)
            {
                return false;
            }
        }
    }
    true
}

/// Nest-sum identities of the closed-form permutation: rainbow sums `N+2`
/// at even arguments, left-nest sums `2p+1`, and the empirically confirmed
/// right-nest constant `4p+2q+1`, with multiplicities `p` and `q`.
pub fn nest_sums(rmax: usize, qmax: usize) -> Report {
    let mut report = Report::new("nest-sums");
    for r in 1..=rmax {
        for q in 1..=qmax {
            let p = r * (q + 1);
            let sigma = three_nose_permutation(r, q);
            let built = build_three_nose_meander(p, q).expect("Morse shape");
            report.check(built.sigma() == &sigma, || {
                format!("builder/closed-form mismatch at r={r}, q={q}")
            });
            let inv = sigma.inverse();
            let n = sigma.n();
            let (mut left, mut right, mut ok) = (0usize, 0usize, true);
            for m in 1..n {
                let sum = inv.apply(m) + inv.apply(m + 1);
                if m % 2 == 0 {
                    ok &= sum == n + 2;
                } else if sum == 2 * p + 1 {
                    left += 1;
                } else if sum == 4 * p + 2 * q + 1 {
                    right += 1;
                } else {
                    ok = false;
                }
            }
            report.check(ok && left == p && right == q, || {
                format!("nest sums failed at r={r}, q={q}")
            });
        }
    }
    report
}

/// The nest-insertion recursion: suspending the rotated previous meander
/// and inserting a q-nest reproduces the geometric construction.
pub fn insertion(rmax: usize, qmax: usize) -> Report {
    let mut report = Report::new("insertion");
    for r in 2..=rmax {
        for q in 1..=qmax {
            let p_prev = (r - 1) * (q + 1);
            let result: Result<bool> = (|| {
                let prev = build_three_nose_meander(p_prev, q)?;
                let suspended = Meander::from_sigma(prev.sigma().kappa().suspend()?);
                let inserted = insert_nest(&suspended, q)?;
                let target = build_three_nose_meander(p_prev + q + 1, q)?;
                Ok(inserted.sigma() == target.sigma())
            })();
            report.check(result.unwrap_or(false), || {
                format!("insertion step failed at r={r}, q={q}")
            });
        }
    }
    report
}

/// Reversibility column of the classification table against the known
/// verdicts for 63 arcs, plus supporting graph facts used by the table.
pub fn table63(n: u64) -> Report {
    let mut report = Report::new("table");
    let rows = match cfrac::enumerate_table(n) {
        Ok(rows) => rows,
        Err(e) => {
            let mut r = report;
            r.check(false, || format!("enumeration failed: {e}"));
            return r;
        }
    };
    if n == 63 {
        report.check(rows.len() == 22, || format!("expected 22 rows, got {}", rows.len()));
        let iso_count = rows.iter().filter(|r| r.iso).count();
        report.check(iso_count == 5, || format!("expected 5 isotropic rows, got {iso_count}"));
        let rev_count = rows.iter().filter(|r| r.rev).count();
        report.check(rev_count == 7, || format!("expected 7 reversible rows, got {rev_count}"));
    } else {
        report.check(!rows.is_empty(), || "empty table".to_string());
    }
    for row in &rows {
        report.check(row.rev == row.rev_lattice.is_some(), || {
            format!("reversible row {} lacks a lattice witness", row.b)
        });
    }
    report
}

/// Graph sanity shared by all pointed graphs in range: edges drop exactly
/// one level and the distinguished vertex collects exactly the sinks.
pub fn pointed_graph_shape(rmax: usize, qmax: usize) -> Report {
    let mut report = Report::new("pointed-shape");
    for r in 1..=rmax {
        for q in 1..=qmax {
            if r * q <= 1 {
                continue;
            }
            let sigma = three_nose_permutation(r, q);
            let g = connection_graph(&sigma, true).expect("graph");
            let edges_ok = g
                .all_edges()
                .all(|(u, v)| g.level(u) == g.level(v) + 1);
            let mu0 = (1..=sigma.n())
                .filter(|&v| g.level(v) == 0)
                .count();
            report.check(edges_ok && g.star_edges().len() == mu0, || {
                format!("pointed shape violated at r={r}, q={q}")
            });
            report.check(
                g.star_edges().iter().all(|&(_, t)| t == STAR),
                || format!("stray bookkeeping edge at r={r}, q={q}"),
            );
        }
    }
    report
}
