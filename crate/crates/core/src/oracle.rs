//! Brute-force SINR reference. Writes each scheme's signal and interference
//! sums out term by term from cell geometry and base powers, without going
//! through [`crate::allocation`] or the SINR engine, so the two routes can be
//! compared.

use crate::allocation::{split_home, BufferReallocation, ContentPlan};
use crate::grid::{GridSpec, Lsa, Point};
use crate::propagation::PathLoss;

pub struct Oracle<'a> {
    pub spec: &'a GridSpec,
    pub plan: &'a ContentPlan,
    pub pathloss: &'a dyn PathLoss,
    pub n0: f64,
    pub d_min: f64,
}

struct Tower {
    lsa: Lsa,
    buffer: bool,
    x: f64,
    y: f64,
}

impl Oracle<'_> {
    fn towers(&self) -> Vec<Tower> {
        let s = self.spec;
        let mut out = Vec::new();
        for r in 0..s.rows {
            for c in 0..s.cols {
                let lsa = if c < s.lsa1_cols {
                    Lsa::Lsa1
                } else {
                    Lsa::Lsa2
                };
                let dist_to_boundary = if c < s.lsa1_cols {
                    s.lsa1_cols - 1 - c
                } else {
                    c - s.lsa1_cols
                };
                out.push(Tower {
                    lsa,
                    buffer: dist_to_boundary < s.buffer_cols_per_side,
                    x: s.isd * (c as f64 + 0.5),
                    y: s.isd * (r as f64 + 0.5),
                });
            }
        }
        out
    }

    fn g(&self, t: &Tower, p: Point) -> f64 {
        let d = ((t.x - p.x).powi(2) + (t.y - p.y).powi(2)).sqrt();
        self.pathloss
            .gain(if d < self.d_min { self.d_min } else { d })
    }

    fn s(&self, lsa: Lsa, m: usize) -> f64 {
        if lsa == Lsa::Lsa1 {
            self.plan.power_w[m - 1]
        } else {
            self.plan.power_lsa2_w[m - 1]
        }
    }

    fn p_total(&self, lsa: Lsa) -> f64 {
        (1..=self.plan.m_count()).map(|m| self.s(lsa, m)).sum()
    }

    fn receiver_lsa(&self, p: Point) -> Lsa {
        let col = (p.x / self.spec.isd)
            .floor()
            .max(0.0)
            .min((self.spec.cols - 1) as f64) as usize;
        if col < self.spec.lsa1_cols {
            Lsa::Lsa1
        } else {
            Lsa::Lsa2
        }
    }

    /// Linear SINR of content `m` at `p` under the named scheme.
    pub fn sinr(
        &self,
        scheme: &str,
        beta: f64,
        realloc: BufferReallocation,
        m: usize,
        p: Point,
    ) -> f64 {
        let own = self.receiver_lsa(p);
        let mc = self.plan.m_count();
        let noise = self.n0 * self.plan.bandwidth_hz[m - 1];
        let mut num = 0.0;
        let mut den = 0.0;
        for t in self.towers() {
            let g = self.g(&t, p);
            // transmitted power of content m from tower t, 0 when not in the Gamma set
            let power = match scheme {
                "reuse1" => self.s(t.lsa, m),
                "olsi" => {
                    if m == 1 || split_home(m, mc) == t.lsa {
                        self.s(t.lsa, m)
                    } else {
                        0.0
                    }
                }
                "ps" => match (m == 1, t.buffer) {
                    (_, false) => self.s(t.lsa, m),
                    (false, true) => beta * self.s(t.lsa, m),
                    (true, true) => {
                        let scaled: f64 = (2..=mc).map(|k| beta * self.s(t.lsa, k)).sum();
                        self.p_total(t.lsa) - scaled
                    }
                },
                "imo" => {
                    // LB carries LSA1's half of the locals, RB carries LSA2's
                    let carrier = t.lsa;
                    match (m == 1, t.buffer) {
                        (_, false) => self.s(t.lsa, m),
                        (false, true) => {
                            if split_home(m, mc) == carrier {
                                beta * self.s(t.lsa, m)
                            } else {
                                0.0
                            }
                        }
                        (true, true) => {
                            if realloc == BufferReallocation::Global {
                                let kept: f64 = (2..=mc)
                                    .filter(|&k| split_home(k, mc) == carrier)
                                    .map(|k| beta * self.s(t.lsa, k))
                                    .sum();
                                self.p_total(t.lsa) - kept
                            } else {
                                self.s(t.lsa, 1)
                            }
                        }
                    }
                }
                other => panic!("oracle has no equations for scheme {other:?}"),
            };
            if m == 1 || t.lsa == own {
                num += power * g;
            } else {
                den += power * g;
            }
        }
        num / (den + noise)
    }
}
