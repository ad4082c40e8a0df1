//! Browser bindings for the meander explorer page. Three operations are
//! exposed: describing a meander (arcs plus validation data for the arc
//! diagram), deriving its connection graph (ranked vertices plus edges and
//! an optional reversor), and classifying a nest ratio by its continued
//! fraction. All results are JSON strings; errors surface as JS exceptions.
//!
//! The logic lives in [`demo`] as plain string-in/string-out functions so
//! it can be tested on any target; the `#[wasm_bindgen]` exports wrap them
//! on wasm32 only.

pub mod demo {
    use serde::Serialize;

    use sturm_core::cfrac::{self, ContinuedFraction};
    use sturm_core::connections::{connection_graph, find_reversor, STAR};
    use sturm_core::invariants::{morse_indices, morse_polynomial};
    use sturm_core::meander::{Meander, Side};
    use sturm_core::permutation::Permutation;
    use sturm_core::three_nose::{
        build_three_nose_meander, chafee_infante_permutation, equilibrium_labels,
        three_nose_permutation,
    };

    fn err(e: impl ToString) -> String {
        e.to_string()
    }

    /// Generates a family permutation as comma-separated text. `kind` is
    /// one of `ci` (uses `a` as the dimension), `rq` (Morse family), or
    /// `pq` (explicit nest sizes).
    pub fn family_permutation(
        kind: &str,
        a: usize,
        b: usize,
        kappa: bool,
        rho: bool,
        suspend: usize,
    ) -> Result<String, String> {
        let sigma = match kind {
            "ci" => {
                if a < 1 {
                    return Err(err("d must be at least 1"));
                }
                chafee_infante_permutation(a)
            }
            "rq" => {
                if a < 1 || b < 1 {
                    return Err(err("r and q must be at least 1"));
                }
                three_nose_permutation(a, b)
            }
            "pq" => build_three_nose_meander(a, b).map_err(err)?.sigma().clone(),
            other => return Err(err(format!("unknown family {other:?}"))),
        };
        let mut sigma = sigma;
        if kappa {
            sigma = sigma.kappa();
        }
        if rho {
            sigma = sigma.inverse();
        }
        sigma = sigma.suspend_times(suspend).map_err(err)?;
        Ok(sigma.to_text())
    }

    #[derive(Serialize)]
    struct ArcJson {
        side: &'static str,
        a: usize,
        b: usize,
    }

    #[derive(Serialize)]
    struct MeanderJson {
        n: usize,
        sigma: Vec<usize>,
        axis_of_vertex: Vec<usize>,
        arcs: Vec<ArcJson>,
        dissipative: bool,
        jordan: bool,
        morse: bool,
        sturm: bool,
        noses: usize,
        morse_indices: Option<Vec<i64>>,
        i_min: Option<i64>,
        i_max: Option<i64>,
        morse_counts: Option<Vec<usize>>,
    }

    /// Parses a permutation and reports everything the arc-diagram view
    /// needs.
    pub fn describe_meander(sigma_text: &str) -> Result<String, String> {
        let sigma: Permutation = sigma_text.parse().map_err(err)?;
        let meander = Meander::from_sigma(sigma.clone());
        let arcs = meander
            .upper_arcs()
            .iter()
            .chain(meander.lower_arcs().iter())
            .map(|arc| ArcJson {
                side: match arc.side {
                    Side::Upper => "upper",
                    Side::Lower => "lower",
                },
                a: arc.a,
                b: arc.b,
            })
            .collect();
        let indices = morse_indices(&sigma).ok();
        let counts = if meander.is_morse() {
            morse_polynomial(&sigma, false).ok().map(|mp| mp.dense())
        } else {
            None
        };
        let inv = sigma.inverse();
        let report = MeanderJson {
            n: meander.n(),
            sigma: sigma.image().to_vec(),
            axis_of_vertex: (1..=meander.n()).map(|v| inv.apply(v)).collect(),
            arcs,
            dissipative: meander.is_dissipative(),
            jordan: meander.is_jordan(),
            morse: meander.is_morse(),
            sturm: meander.is_sturm(),
            noses: meander.nose_count(),
            morse_indices: indices.as_ref().map(|iv| iv.values().to_vec()),
            i_min: indices.as_ref().map(|iv| iv.min()),
            i_max: indices.as_ref().map(|iv| iv.max()),
            morse_counts: counts,
        };
        Ok(serde_json::to_string(&report).unwrap())
    }

    #[derive(Serialize)]
    struct GraphVertexJson {
        id: usize,
        level: i64,
        axis: usize,
        #[serde(skip_serializing_if = "Option::is_none")]
        label: Option<String>,
    }

    #[derive(Serialize)]
    struct GraphJson {
        pointed: bool,
        vertices: Vec<GraphVertexJson>,
        edges: Vec<(usize, usize)>,
        star_edges: Vec<(usize, usize)>,
        reversor: Option<Vec<(usize, usize)>>,
    }

    /// Builds the connection graph of a Sturm permutation. With `r, q >= 1`
    /// the permutation must be that family member and vertices carry
    /// equilibrium labels; pass `r = q = 0` for no labels. The reversor
    /// search always runs on the pointed graph; `null` means irreversible.
    pub fn describe_graph(
        sigma_text: &str,
        pointed: bool,
        r: usize,
        q: usize,
    ) -> Result<String, String> {
        let sigma: Permutation = sigma_text.parse().map_err(err)?;
        let g = connection_graph(&sigma, pointed).map_err(err)?;
        let labels = if r >= 1 && q >= 1 {
            if sigma != three_nose_permutation(r, q) {
                return Err(err(format!(
                    "permutation is not the (r,q)=({r},{q}) family member"
                )));
            }
            Some(equilibrium_labels(r, q))
        } else {
            None
        };
        let reversor = {
            let pointed_graph = if pointed {
                g.clone()
            } else {
                connection_graph(&sigma, true).map_err(err)?
            };
            find_reversor(&pointed_graph).map(|rev| {
                rev.map()
                    .iter()
                    .filter(|(v, w)| v <= w)
                    .map(|(&v, &w)| (v, w))
                    .collect::<Vec<_>>()
            })
        };
        let inv = sigma.inverse();
        let vertices = g
            .vertex_ids()
            .map(|id| GraphVertexJson {
                id,
                level: g.level(id),
                axis: if id == STAR {
                    sigma.n() + 1
                } else {
                    inv.apply(id)
                },
                label: labels.as_ref().map(|l| l.label_at_meander(id).to_string()),
            })
            .collect();
        let report = GraphJson {
            pointed,
            vertices,
            edges: g.edges().iter().copied().collect(),
            star_edges: g.star_edges().iter().copied().collect(),
            reversor,
        };
        Ok(serde_json::to_string(&report).unwrap())
    }

    #[derive(Serialize)]
    struct CfracJson {
        b: Vec<u64>,
        b_reversed: Vec<u64>,
        n0: u64,
        q_plus_1: u64,
        q_plus_1_inv: u64,
        iso: bool,
        p: u64,
        q: u64,
        s: u64,
        d: u64,
        n: u64,
        pointed_morse_counts: Option<Vec<usize>>,
        suspended_sigma: Option<String>,
    }

    /// Expands `n0 / den` into its continued fraction and reports the
    /// derived nest data, including the suspended Sturm permutation when
    /// it is small enough to draw.
    pub fn classify_ratio(n0: u64, den: u64) -> Result<String, String> {
        let cf = ContinuedFraction::expand(n0, den).map_err(err)?;
        let dq = cfrac::derived_quantities(&cf).map_err(err)?;
        let counts = if cf.m() == 2 {
            let t = cf.terms();
            Some(
                cfrac::short_morse_polynomial(t[0], t[1], t[2])
                    .map_err(err)?
                    .dense(),
            )
        } else {
            None
        };
        let suspended = if dq.n <= 200 {
            Some(
                cfrac::suspended_sturm_meander(&cf)
                    .map_err(err)?
                    .sigma()
                    .to_text(),
            )
        } else {
            None
        };
        let report = CfracJson {
            b: cf.terms().to_vec(),
            b_reversed: cf.reversed().terms().to_vec(),
            n0: dq.n0,
            q_plus_1: dq.q + 1,
            q_plus_1_inv: cfrac::mod_inverse(dq.q + 1, dq.n0).map_err(err)?,
            iso: cf.is_isotropic(),
            p: dq.p,
            q: dq.q,
            s: dq.s,
            d: dq.d,
            n: dq.n,
            pointed_morse_counts: counts,
            suspended_sigma: suspended,
        };
        Ok(serde_json::to_string(&report).unwrap())
    }
}

#[cfg(target_arch = "wasm32")]
mod bindings {
    use wasm_bindgen::prelude::*;

    fn to_js<T>(result: Result<T, String>) -> Result<T, JsValue> {
        result.map_err(|e| JsValue::from_str(&e))
    }

    #[wasm_bindgen]
    pub fn family_permutation(
        kind: &str,
        a: usize,
        b: usize,
        kappa: bool,
        rho: bool,
        suspend: usize,
    ) -> Result<String, JsValue> {
        to_js(crate::demo::family_permutation(kind, a, b, kappa, rho, suspend))
    }

    #[wasm_bindgen]
    pub fn describe_meander(sigma_text: &str) -> Result<String, JsValue> {
        to_js(crate::demo::describe_meander(sigma_text))
    }

    #[wasm_bindgen]
    pub fn describe_graph(
        sigma_text: &str,
        pointed: bool,
        r: usize,
        q: usize,
    ) -> Result<String, JsValue> {
        to_js(crate::demo::describe_graph(sigma_text, pointed, r, q))
    }

    // u32 at the boundary keeps the JS side on plain numbers.
    #[wasm_bindgen]
    pub fn classify_ratio(n0: u32, den: u32) -> Result<String, JsValue> {
        to_js(crate::demo::classify_ratio(n0 as u64, den as u64))
    }
}
