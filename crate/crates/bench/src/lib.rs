//! Deterministic synthetic corpora for benchmarking the pipeline.

const SUBJECTS: &[&str] = &[
    "The controller",
    "The processor",
    "Member States",
    "The data subject",
    "The supervisory authority",
    "Each natural person",
];
const SIGNALS: &[&str] = &["shall", "shall not", "must", "may", "should", "is required to"];
const VERBS: &[&str] = &["inform", "notify", "erase", "keep", "transfer", "restrict", "document", "review"];
const OBJECTS: &[&str] = &[
    "records of processing activities",
    "personal data concerning him or her",
    "the competent authority without undue delay",
    "any breach affecting the rights of persons",
    "the purposes of direct marketing",
    "appropriate technical and organisational measures",
];

/// Small xorshift so corpora are identical across runs and platforms.
struct Rng(u64);

impl Rng {
    fn pick<'a>(&mut self, items: &[&'a str]) -> &'a str {
        self.0 ^= self.0 << 13;
        self.0 ^= self.0 >> 7;
        self.0 ^= self.0 << 17;
        items[(self.0 % items.len() as u64) as usize]
    }
}

/// A document of `articles` marker-headed articles with `per_article`
/// sentences each; roughly one sentence in five carries no signal word.
pub fn synthetic_regulation(articles: usize, per_article: usize, seed: u64) -> String {
    let mut rng = Rng(seed | 1);
    let mut out = String::new();
    for a in 1..=articles {
        out.push_str(&format!("Article {a}\n"));
        for s in 0..per_article {
            let subject = rng.pick(SUBJECTS);
            let object = rng.pick(OBJECTS);
            if s % 5 == 4 {
                out.push_str(&format!("{subject} is referred to in {object}. "));
            } else {
                let signal = rng.pick(SIGNALS);
                let verb = rng.pick(VERBS);
                out.push_str(&format!("{subject} {signal} {verb} {object}. "));
            }
        }
        out.push_str("\n\n");
    }
    out
}
