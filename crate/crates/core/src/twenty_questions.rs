//! Twenty questions with uncommitted respondents.
//!
//! No respondent has a word in mind. Each answers yes or no freely, subject
//! only to the rule that some word must remain compatible with every reply
//! given so far. In the default [`Mode::Surprise`] a respondent leaves the
//! room after answering, so a bet on "the word they had in mind" is settled
//! against their replies alone and may have to be called off.

use bitvec::prelude::*;
use num_traits::{One, Zero};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::random::seeded;
use crate::scalar::format_rational;
use crate::Rational;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GameError {
    #[error("lexicon needs at least one word and one attribute")]
    EmptyLexicon,
    #[error("duplicate label {0:?}")]
    DuplicateLabel(String),
    #[error("table row for {word:?} has {found} entries, expected {expected}")]
    RowLength { word: String, expected: usize, found: usize },
    #[error("words {0:?} and {1:?} have identical attributes")]
    Indistinguishable(String, String),
    #[error("unknown word {0:?}")]
    UnknownWord(String),
    #[error("unknown attribute {0:?}")]
    UnknownAttribute(String),
    #[error("a game needs at least one respondent")]
    NoRespondents,
    #[error("no respondent {0}")]
    UnknownRespondent(usize),
    #[error("respondent {0} has left and cannot be asked again")]
    Departed(usize),
    #[error("question budget of {0} exhausted")]
    BudgetExhausted(usize),
    #[error("answering {answer} to {attribute:?} leaves no compatible word")]
    InconsistentAnswer { attribute: String, answer: bool },
    #[error("price {0} is outside [0, 1]")]
    PriceOutOfRange(String),
    #[error("the game is over")]
    GameOver,
    #[error("the adversary needs at least two contexts to choose from")]
    SingleContext,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Lexicon {
    words: Vec<String>,
    attributes: Vec<String>,
    table: Vec<Vec<bool>>,
}

fn check_unique(labels: &[String]) -> Result<(), GameError> {
    for (i, l) in labels.iter().enumerate() {
        if labels[..i].contains(l) {
            return Err(GameError::DuplicateLabel(l.clone()));
        }
    }
    Ok(())
}

impl Lexicon {
    pub fn new(words: Vec<String>, attributes: Vec<String>, table: Vec<Vec<bool>>) -> Result<Self, GameError> {
        if words.is_empty() || attributes.is_empty() {
            return Err(GameError::EmptyLexicon);
        }
        check_unique(&words)?;
        check_unique(&attributes)?;
        if table.len() != words.len() {
            return Err(GameError::RowLength {
                word: "<table>".into(),
                expected: words.len(),
                found: table.len(),
            });
        }
        for (w, row) in words.iter().zip(&table) {
            if row.len() != attributes.len() {
                return Err(GameError::RowLength {
                    word: w.clone(),
                    expected: attributes.len(),
                    found: row.len(),
                });
            }
        }
        for i in 0..table.len() {
            for j in 0..i {
                if table[i] == table[j] {
                    return Err(GameError::Indistinguishable(words[j].clone(), words[i].clone()));
                }
            }
        }
        Ok(Lexicon {
            words,
            attributes,
            table,
        })
    }

    pub fn words(&self) -> &[String] {
        &self.words
    }

    pub fn attributes(&self) -> &[String] {
        &self.attributes
    }

    pub fn has(&self, word: usize, attribute: usize) -> bool {
        self.table[word][attribute]
    }

    pub fn word_index(&self, w: &str) -> Result<usize, GameError> {
        self.words
            .iter()
            .position(|x| x == w)
            .ok_or_else(|| GameError::UnknownWord(w.to_string()))
    }

    pub fn attribute_index(&self, a: &str) -> Result<usize, GameError> {
        self.attributes
            .iter()
            .position(|x| x == a)
            .ok_or_else(|| GameError::UnknownAttribute(a.to_string()))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Mode {
    /// Each respondent answers once and leaves.
    #[default]
    Surprise,
    /// Respondents stay and may be asked repeatedly.
    Classic,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Answer {
    pub respondent: usize,
    pub attribute: usize,
    pub answer: bool,
    /// Only this answer kept some word compatible.
    pub forced: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Proposition {
    Word(usize),
    Attribute(usize, bool),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BetStatus {
    Open,
    Won,
    Lost,
    Void,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Bet {
    pub id: usize,
    pub respondent: usize,
    pub proposition: Proposition,
    pub price: Rational,
    pub status: BetStatus,
}

impl Bet {
    /// Net gain to the ticket holder: `1 − price` if won, `−price` if lost,
    /// nothing if open or refunded.
    pub fn payoff(&self) -> Rational {
        match self.status {
            BetStatus::Won => Rational::one() - &self.price,
            BetStatus::Lost => -self.price.clone(),
            BetStatus::Open | BetStatus::Void => Rational::zero(),
        }
    }
}

pub const DEFAULT_BUDGET: usize = 20;

#[derive(Clone, Debug)]
pub struct GameState {
    lexicon: Lexicon,
    mode: Mode,
    budget: usize,
    /// Words compatible with every reply so far.
    consistent: BitVec,
    /// Per respondent: words compatible with the transcript up to their last reply.
    compatible: Vec<BitVec>,
    departed: Vec<bool>,
    transcript: Vec<Answer>,
    bets: Vec<Bet>,
    over: bool,
    rng: ChaCha8Rng,
}

impl GameState {
    pub fn new(lexicon: Lexicon, respondents: usize, seed: u64) -> Result<Self, GameError> {
        Self::with_options(lexicon, respondents, seed, Mode::default(), DEFAULT_BUDGET)
    }

    pub fn with_options(
        lexicon: Lexicon,
        respondents: usize,
        seed: u64,
        mode: Mode,
        budget: usize,
    ) -> Result<Self, GameError> {
        if respondents == 0 {
            return Err(GameError::NoRespondents);
        }
        let full = bitvec![1; lexicon.words.len()];
        Ok(GameState {
            mode,
            budget,
            consistent: full.clone(),
            compatible: vec![full; respondents],
            departed: vec![false; respondents],
            transcript: Vec::new(),
            bets: Vec::new(),
            over: false,
            rng: seeded(seed),
            lexicon,
        })
    }

    pub fn lexicon(&self) -> &Lexicon {
        &self.lexicon
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn respondents(&self) -> usize {
        self.compatible.len()
    }

    pub fn transcript(&self) -> &[Answer] {
        &self.transcript
    }

    pub fn bets(&self) -> &[Bet] {
        &self.bets
    }

    pub fn has_departed(&self, respondent: usize) -> bool {
        self.departed.get(respondent).copied().unwrap_or(false)
    }

    fn words_of(&self, set: &BitVec) -> Vec<String> {
        set.iter_ones().map(|i| self.lexicon.words[i].clone()).collect()
    }

    /// Words compatible with every reply given so far.
    pub fn consistent_words(&self) -> Vec<String> {
        self.words_of(&self.consistent)
    }

    pub fn compatible_words(&self, respondent: usize) -> Result<Vec<String>, GameError> {
        let set = self
            .compatible
            .get(respondent)
            .ok_or(GameError::UnknownRespondent(respondent))?;
        Ok(self.words_of(set))
    }

    /// No respondent left to ask, or the budget is spent.
    pub fn is_over(&self) -> bool {
        self.over || self.transcript.len() >= self.budget || self.departed.iter().all(|&d| d)
    }

    fn narrowed(&self, attribute: usize, answer: bool) -> BitVec {
        let mut s = self.consistent.clone();
        for w in 0..s.len() {
            if s[w] && self.lexicon.table[w][attribute] != answer {
                s.set(w, false);
            }
        }
        s
    }

    /// Ask with the default policy: uniformly among the answers that keep
    /// some word compatible with every reply so far.
    pub fn ask(&mut self, respondent: usize, attribute: usize) -> Result<Answer, GameError> {
        self.ask_with(respondent, attribute, None)
    }

    /// Ask, optionally dictating the reply. A dictated reply must keep some
    /// word compatible.
    pub fn ask_with(&mut self, respondent: usize, attribute: usize, scripted: Option<bool>) -> Result<Answer, GameError> {
        if self.over {
            return Err(GameError::GameOver);
        }
        if respondent >= self.respondents() {
            return Err(GameError::UnknownRespondent(respondent));
        }
        if self.departed[respondent] {
            return Err(GameError::Departed(respondent));
        }
        if attribute >= self.lexicon.attributes.len() {
            return Err(GameError::UnknownAttribute(attribute.to_string()));
        }
        if self.transcript.len() >= self.budget {
            return Err(GameError::BudgetExhausted(self.budget));
        }
        let yes = self.narrowed(attribute, true);
        let no = self.narrowed(attribute, false);
        let viable = (yes.any(), no.any());
        let forced = viable.0 != viable.1;
        let answer = match scripted {
            Some(a) => {
                if !(if a { viable.0 } else { viable.1 }) {
                    return Err(GameError::InconsistentAnswer {
                        attribute: self.lexicon.attributes[attribute].clone(),
                        answer: a,
                    });
                }
                a
            }
            None if forced => viable.0,
            None => self.rng.random_bool(0.5),
        };
        self.consistent = if answer { yes } else { no };
        self.compatible[respondent] = self.consistent.clone();
        if self.mode == Mode::Surprise {
            self.departed[respondent] = true;
        }
        let a = Answer {
            respondent,
            attribute,
            answer,
            forced,
        };
        self.transcript.push(a.clone());
        Ok(a)
    }

    pub fn place_bet(&mut self, respondent: usize, proposition: Proposition, price: Rational) -> Result<&Bet, GameError> {
        if respondent >= self.respondents() {
            return Err(GameError::UnknownRespondent(respondent));
        }
        if price < Rational::zero() || price > Rational::one() {
            return Err(GameError::PriceOutOfRange(format_rational(&price)));
        }
        match proposition {
            Proposition::Word(w) if w >= self.lexicon.words.len() => {
                return Err(GameError::UnknownWord(w.to_string()))
            }
            Proposition::Attribute(a, _) if a >= self.lexicon.attributes.len() => {
                return Err(GameError::UnknownAttribute(a.to_string()))
            }
            _ => {}
        }
        let id = self.bets.len();
        self.bets.push(Bet {
            id,
            respondent,
            proposition,
            price,
            status: BetStatus::Open,
        });
        Ok(&self.bets[id])
    }

    fn holds(&self, p: &Proposition, word: usize) -> bool {
        match *p {
            Proposition::Word(w) => w == word,
            Proposition::Attribute(a, v) => self.lexicon.table[word][a] == v,
        }
    }

    /// Close the game and settle every bet against the respondent's replies.
    /// True for every compatible word → won, for none → lost, otherwise the
    /// bet is void and refunded.
    pub fn resolve_bets(&mut self) -> &[Bet] {
        self.over = true;
        let statuses: Vec<BetStatus> = self
            .bets
            .iter()
            .map(|b| {
                let set = &self.compatible[b.respondent];
                let (mut any_true, mut any_false) = (false, false);
                for w in set.iter_ones() {
                    if self.holds(&b.proposition, w) {
                        any_true = true;
                    } else {
                        any_false = true;
                    }
                }
                match (any_true, any_false) {
                    (true, false) => BetStatus::Won,
                    (false, true) => BetStatus::Lost,
                    _ => BetStatus::Void,
                }
            })
            .collect();
        for (b, s) in self.bets.iter_mut().zip(statuses) {
            b.status = s;
        }
        &self.bets
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AdversaryRound {
    pub bought: String,
    pub price: Rational,
    pub chosen: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AdversaryReport {
    pub rounds: Vec<AdversaryRound>,
    pub total_loss: Rational,
}

/// Each round the agent pays its price for a ticket on the context it rates
/// most likely; the adversary then picks a different context to actually
/// use, so the ticket never pays.
pub fn adversarial_context_demo(
    prices: &[(String, Rational)],
    n_rounds: usize,
    seed: u64,
) -> Result<AdversaryReport, GameError> {
    if prices.len() < 2 {
        return Err(GameError::SingleContext);
    }
    check_unique(&prices.iter().map(|(c, _)| c.clone()).collect::<Vec<_>>())?;
    if let Some((_, p)) = prices.iter().find(|(_, p)| *p < Rational::zero() || *p > Rational::one()) {
        return Err(GameError::PriceOutOfRange(format_rational(p)));
    }
    let top = prices.iter().map(|(_, p)| p).max().unwrap();
    let favourites: Vec<usize> = (0..prices.len()).filter(|&i| &prices[i].1 == top).collect();
    let mut rng = seeded(seed);
    let mut rounds = Vec::with_capacity(n_rounds);
    let mut total_loss = Rational::zero();
    for _ in 0..n_rounds {
        let bought = favourites[rng.random_range(0..favourites.len())];
        let chosen = (0..prices.len()).find(|&i| i != bought).unwrap();
        total_loss += &prices[bought].1;
        rounds.push(AdversaryRound {
            bought: prices[bought].0.clone(),
            price: prices[bought].1.clone(),
            chosen: prices[chosen].0.clone(),
        });
    }
    Ok(AdversaryReport { rounds, total_loss })
}
