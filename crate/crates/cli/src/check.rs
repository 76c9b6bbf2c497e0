use hartree_core::params::{
    classify_existence, classify_regularity, decay_case, theta_interval, ComponentDecay, DecayCase,
    DecayKind, ExistenceClass, ExistenceTag, RegularityRegion, ThetaInterval,
};
use hartree_core::ProblemParams;
use serde::Serialize;

use crate::exit;

#[derive(Debug, Clone, Serialize)]
pub struct CheckReport {
    #[serde(rename = "N")]
    pub n: usize,
    pub alpha: f64,
    pub p: f64,
    pub q: f64,
    pub existence: ExistenceClass,
    pub theta: ThetaInterval,
    pub regularity: Option<RegularityRegion>,
    pub decay: DecayCase,
}

impl CheckReport {
    pub fn new(params: &ProblemParams) -> Self {
        Self {
            n: params.n(),
            alpha: params.alpha(),
            p: params.p(),
            q: params.q(),
            existence: classify_existence(params),
            theta: theta_interval(params),
            regularity: classify_regularity(params).ok(),
            decay: decay_case(params),
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self.existence.tag {
            ExistenceTag::ExistsH1 => exit::OK,
            ExistenceTag::NonexistenceLowerLine | ExistenceTag::NonexistenceUpperLine => {
                exit::NONEXISTENCE
            }
            ExistenceTag::OutsideTheory => exit::OUTSIDE_THEORY,
        }
    }

    pub fn render(&self) -> String {
        let mut out = format!(
            "N = {}, alpha = {}, p = {}, q = {}\nexistence: {}\n",
            self.n, self.alpha, self.p, self.q, self.existence.tag
        );
        match self.theta.canonical {
            Some((t1, t2)) => out.push_str(&format!(
                "1/theta1 in ({}, {}); canonical theta1 = {t1}, theta2 = {t2}\n",
                self.theta.lower, self.theta.upper
            )),
            None => out.push_str(&format!(
                "1/theta1 interval empty: ({}, {})\n",
                self.theta.lower, self.theta.upper
            )),
        }
        match &self.regularity {
            Some(r) => out.push_str(&format!(
                "regularity: region {}{}, r_bar = {}, h_bar = {}\n",
                r.region, r.subcase, r.r_bar, r.h_bar
            )),
            None => out.push_str("regularity: not classified\n"),
        }
        out.push_str(&format!(
            "decay: u {}, v {}{}{}\n",
            describe(&self.decay.u),
            describe(&self.decay.v),
            if self.decay.extra_ok {
                ""
            } else {
                " (extra lower bounds fail)"
            },
            if self.decay.non_l1_condition {
                " (a component may not be integrable)"
            } else {
                ""
            },
        ));
        out
    }
}

fn describe(c: &ComponentDecay) -> String {
    match c.kind {
        DecayKind::Algebraic { exponent } => format!("algebraic |x|^-{exponent}"),
        DecayKind::Exponential => "exponential".into(),
        DecayKind::Critical => "critical".into(),
    }
}
