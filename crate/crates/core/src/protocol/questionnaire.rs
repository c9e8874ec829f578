//! End-of-experiment strategy questionnaire, rating categories for coding its
//! free-text answers, and the demographics survey.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::grid::{Coord, Digit};
use crate::puzzle::{HiddenSinglePuzzle, ResponseRole};

pub const ATTENTION_QUESTIONS: usize = 3;
pub const QUESTION_COUNT: u8 = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum QuestionKind {
    /// 0 to 100 in steps of 5.
    Confidence,
    FreeText,
    Choice,
    Cells,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Question {
    pub number: u8,
    pub kind: QuestionKind,
    pub text: &'static str,
    /// Options (a) and (b) for multiple-choice questions.
    pub options: &'static [&'static str],
}

pub const QUESTIONS: [Question; 10] = [
    Question {
        number: 1,
        kind: QuestionKind::Confidence,
        text: "How confident do you feel that your answer is correct, expressed as a percentage?",
        options: &[],
    },
    Question {
        number: 2,
        kind: QuestionKind::FreeText,
        text: "Explain as clearly as possible the steps you went through to choose your answer. Please be as \
               detailed as possible so that someone else could replicate your strategy by following your response.",
        options: &[],
    },
    Question {
        number: 3,
        kind: QuestionKind::Choice,
        text: "There are two numbers in the puzzle that occur three times outside of the row/column containing the \
               target cell. Which of the following best describes how you chose between the two candidate numbers \
               to consider?",
        options: &[
            "I noticed something in the puzzle that initially made one candidate seem more likely to be correct \
             than the other.",
            "I arbitrarily chose between the two candidates because they seemed equally promising to consider.",
        ],
    },
    Question {
        number: 4,
        kind: QuestionKind::FreeText,
        text: "What did you notice in the puzzle that initially made one candidate seem more likely to be correct \
               than the other?",
        options: &[],
    },
    Question {
        number: 5,
        kind: QuestionKind::Cells,
        text: "Please select the cell(s) that initially made one candidate seem more likely be correct than the other.",
        options: &[],
    },
    Question {
        number: 6,
        kind: QuestionKind::FreeText,
        text: "Please explain how the cell(s) you selected initially made one seem more likely to be correct than \
               the other.",
        options: &[],
    },
    Question {
        number: 7,
        kind: QuestionKind::Choice,
        text: "After you selected a candidate to consider, did you check further to determine whether that \
               candidate was actually correct or not?",
        options: &[
            "Yes, I checked to see whether the candidate was actually correct.",
            "No, I just submitted my original guess without checking any further.",
        ],
    },
    Question {
        number: 8,
        kind: QuestionKind::FreeText,
        text: "What did you do to determine if that candidate was actually correct?",
        options: &[],
    },
    Question {
        number: 9,
        kind: QuestionKind::Choice,
        text: "Which of the following best describes the way you determined whether or not the candidate was \
               actually the correct answer?",
        options: &[
            "I checked whether the candidate I chose could go in any of the empty blue cells in the row/column.",
            "I looked at other numbers in the puzzle until I noticed something that helped me decide whether or \
             not the candidate was correct.",
        ],
    },
    Question {
        number: 10,
        kind: QuestionKind::FreeText,
        text: "Please provide any additional information or clarifications to any of your previous responses so \
               that we can most accurately understand as best we can how you solved this puzzle.",
        options: &[],
    },
];

pub fn question(number: u8) -> Option<&'static Question> {
    QUESTIONS.get(number.checked_sub(1)? as usize)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Choice {
    A,
    B,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", content = "value", rename_all = "snake_case")]
pub enum AnswerValue {
    Confidence(u8),
    Text(String),
    Choice(Choice),
    Cells(Vec<Coord>),
}

impl AnswerValue {
    pub fn kind(&self) -> QuestionKind {
        match self {
            AnswerValue::Confidence(_) => QuestionKind::Confidence,
            AnswerValue::Text(_) => QuestionKind::FreeText,
            AnswerValue::Choice(_) => QuestionKind::Choice,
            AnswerValue::Cells(_) => QuestionKind::Cells,
        }
    }

    /// Shape check against the question; confidence must be a multiple of 5.
    pub fn fits(&self, q: &Question) -> bool {
        match self {
            AnswerValue::Confidence(v) => q.kind == QuestionKind::Confidence && *v <= 100 && v % 5 == 0,
            AnswerValue::Cells(cells) => q.kind == QuestionKind::Cells && !cells.is_empty(),
            other => other.kind() == q.kind,
        }
    }
}

/// The question after `current`, given the answer just recorded and the
/// role of the puzzle response. `None` ends the questionnaire.
pub fn next_question(current: u8, answer: &AnswerValue, response_role: Option<ResponseRole>) -> Option<u8> {
    let prevalent = response_role.is_some_and(|r| r.is_prevalent());
    match (current, answer) {
        (2, _) if !prevalent => Some(10),
        (3, AnswerValue::Choice(Choice::B)) => Some(10),
        (7, AnswerValue::Choice(Choice::B)) => Some(10),
        (10, _) => None,
        (n, _) => Some(n + 1),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum RatingCategory {
    V1,
    V2,
    V3,
    U1,
    U2,
    I1,
    I2,
    I3,
    M,
    O,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RatingSuperclass {
    Valid,
    Uncertain,
    Invalid,
    Missing,
    Other,
}

impl RatingCategory {
    pub const ALL: [RatingCategory; 10] = [
        RatingCategory::V1,
        RatingCategory::V2,
        RatingCategory::V3,
        RatingCategory::U1,
        RatingCategory::U2,
        RatingCategory::I1,
        RatingCategory::I2,
        RatingCategory::I3,
        RatingCategory::M,
        RatingCategory::O,
    ];

    pub fn superclass(self) -> RatingSuperclass {
        use RatingCategory::*;
        match self {
            V1 | V2 | V3 => RatingSuperclass::Valid,
            U1 | U2 => RatingSuperclass::Uncertain,
            I1 | I2 | I3 => RatingSuperclass::Invalid,
            M => RatingSuperclass::Missing,
            O => RatingSuperclass::Other,
        }
    }

    pub fn description(self) -> &'static str {
        use RatingCategory::*;
        match self {
            V1 => "Chose digit that cannot go elsewhere",
            V2 => "One PD can go elsewhere, chose the other",
            V3 => "Found cell where one PD could go and the other could not",
            U1 => "Potentially valid but general or not fully specified",
            U2 => "Unclear, confused or missing basis",
            I1 => "Explicit guess",
            I2 => "Irrelevant basis for choice",
            I3 => "Chose the most frequent digit",
            M => "Did not answer the question",
            O => "Other",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Rating {
    pub rater: String,
    pub category: RatingCategory,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuestionnaireRecord {
    pub puzzle: HiddenSinglePuzzle,
    pub attention: Vec<String>,
    pub response: Option<Digit>,
    pub answers: BTreeMap<u8, AnswerValue>,
    #[serde(default)]
    pub ratings: Vec<Rating>,
}

impl QuestionnaireRecord {
    pub fn new(puzzle: HiddenSinglePuzzle) -> Self {
        QuestionnaireRecord { puzzle, attention: Vec::new(), response: None, answers: BTreeMap::new(), ratings: Vec::new() }
    }

    pub fn response_role(&self) -> Option<ResponseRole> {
        self.response.map(|d| self.puzzle.role_of(d))
    }

    /// Questions answered, in order.
    pub fn answered(&self) -> Vec<u8> {
        self.answers.keys().copied().collect()
    }

    pub fn confidence(&self) -> Option<u8> {
        match self.answers.get(&1) {
            Some(AnswerValue::Confidence(v)) => Some(*v),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Education {
    NoHighSchool,
    HighSchool,
    Associate,
    Bachelor,
    Master,
    Professional,
    Doctoral,
}

impl Education {
    pub const ALL: [Education; 7] = [
        Education::NoHighSchool,
        Education::HighSchool,
        Education::Associate,
        Education::Bachelor,
        Education::Master,
        Education::Professional,
        Education::Doctoral,
    ];

    pub fn label(self) -> &'static str {
        match self {
            Education::NoHighSchool => "Have not graduated high school",
            Education::HighSchool => "High school graduate, diploma or equivalent",
            Education::Associate => "Associate degree",
            Education::Bachelor => "Bachelor's degree",
            Education::Master => "Master's degree",
            Education::Professional => "Professional degree (e.g. M.D., J.D.)",
            Education::Doctoral => "Doctoral degree",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DegreeStatus {
    CurrentlyPursuing,
    Completed,
}

impl DegreeStatus {
    pub fn label(self) -> &'static str {
        match self {
            DegreeStatus::CurrentlyPursuing => "Currently pursuing",
            DegreeStatus::Completed => "Completed",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MathTopic {
    Algebra,
    Geometry,
    Trigonometry,
    SingleVariableCalculus,
    MultiVariableCalculus,
    LinearAlgebra,
    ProbabilityStatistics,
    DiscreteMathematics,
    FormalLogic,
}

impl MathTopic {
    pub const ALL: [MathTopic; 9] = [
        MathTopic::Algebra,
        MathTopic::Geometry,
        MathTopic::Trigonometry,
        MathTopic::SingleVariableCalculus,
        MathTopic::MultiVariableCalculus,
        MathTopic::LinearAlgebra,
        MathTopic::ProbabilityStatistics,
        MathTopic::DiscreteMathematics,
        MathTopic::FormalLogic,
    ];

    pub fn label(self) -> &'static str {
        match self {
            MathTopic::Algebra => "High school algebra",
            MathTopic::Geometry => "High school geometry",
            MathTopic::Trigonometry => "Trigonometric functions",
            MathTopic::SingleVariableCalculus => "Single-variable calculus",
            MathTopic::MultiVariableCalculus => "Multi-variable calculus",
            MathTopic::LinearAlgebra => "Linear algebra",
            MathTopic::ProbabilityStatistics => "Probability & statistics",
            MathTopic::DiscreteMathematics => "Discrete mathematics",
            MathTopic::FormalLogic => "Formal logic",
        }
    }
}

pub const EDUCATION_QUESTION: &str = "What is your highest level of education (including currently pursuing)?";
pub const DEGREE_STATUS_QUESTION: &str = "Degree status";
pub const MATH_QUESTION: &str = "Which of the following mathematics topics have you taken a course in? Select all that apply.";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Demographics {
    pub age: Option<u16>,
    pub gender: Option<String>,
    pub education: Education,
    pub degree_status: DegreeStatus,
    #[serde(default)]
    pub math_topics: Vec<MathTopic>,
}
