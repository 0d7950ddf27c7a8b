//! Writes the two-language mini-dump used by the end-to-end tests.
//!
//! ```text
//! cargo run -p wikitailor --example gen_minidump -- crates/core/tests/fixtures/minidump
//! ```
//!
//! Output: `enwiki-mini.xml`, `frwiki-mini.xml` and `truth.tsv`
//! (`lang<TAB>article_id<TAB>topic`). An Astronomy tree is planted whose
//! category titles share terms with its seed articles down to depth 3 and
//! drift into people, schools and music below that. Music articles borrow
//! astronomical words so that retrieval picks some of them up.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::fs;
use std::path::PathBuf;

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const SEED: u64 = 20_150_601;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Topic {
    Astro,
    Music,
    MusicMeta,
    Cooking,
    Football,
    Science,
    Bio,
}

impl Topic {
    fn label(self) -> &'static str {
        match self {
            Topic::Astro => "astronomy",
            Topic::Music | Topic::MusicMeta => "music",
            Topic::Cooking => "cooking",
            Topic::Football => "football",
            Topic::Science => "science",
            Topic::Bio => "biography",
        }
    }

    fn kind(self, lang: Lang) -> &'static str {
        match (self, lang) {
            (Topic::Astro, Lang::En) => "astronomy",
            (Topic::Astro, Lang::Fr) => "astronomie",
            (Topic::Music | Topic::MusicMeta, Lang::En) => "band",
            (Topic::Music | Topic::MusicMeta, Lang::Fr) => "groupe",
            (Topic::Cooking, Lang::En) => "dish",
            (Topic::Cooking, Lang::Fr) => "plat",
            (Topic::Football, Lang::En) => "footballer",
            (Topic::Football, Lang::Fr) => "footballeur",
            (Topic::Science, Lang::En) => "physics",
            (Topic::Science, Lang::Fr) => "physique",
            (Topic::Bio, Lang::En) => "person",
            (Topic::Bio, Lang::Fr) => "personnalité",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Lang {
    En,
    Fr,
}

impl Lang {
    fn code(self) -> &'static str {
        match self {
            Lang::En => "en",
            Lang::Fr => "fr",
        }
    }
    fn other(self) -> Lang {
        match self {
            Lang::En => Lang::Fr,
            Lang::Fr => Lang::En,
        }
    }
    fn category_ns(self) -> &'static str {
        match self {
            Lang::En => "Category",
            Lang::Fr => "Catégorie",
        }
    }
}

struct Cat {
    key: &'static str,
    en: &'static str,
    fr: &'static str,
    parents: &'static [&'static str],
    topic: Topic,
    articles: usize,
}

const fn cat(
    key: &'static str,
    en: &'static str,
    fr: &'static str,
    parents: &'static [&'static str],
    topic: Topic,
    articles: usize,
) -> Cat {
    Cat { key, en, fr, parents, topic, articles }
}

use Topic::*;

const CATEGORIES: &[Cat] = &[
    cat("science", "Science", "Sciences", &[], Science, 4),
    cat("astro", "Astronomy", "Astronomie", &["science", "orbits"], Astro, 12),
    // depth 1
    cat("stars", "Stars", "Étoiles", &["astro"], Astro, 8),
    cat("planets", "Planets", "Planètes", &["astro"], Astro, 8),
    cat("galaxies", "Galaxies", "Galaxies", &["astro"], Astro, 8),
    cat("telescopes", "Telescopes", "Télescopes", &["astro"], Astro, 8),
    cat("comets", "Comets", "Comètes", &["astro"], Astro, 8),
    cat("astronomers", "Astronomers", "Astronomes", &["astro"], Astro, 8),
    // depth 2
    cat("varstars", "Variable stars", "Étoiles variables", &["stars"], Astro, 6),
    cat("clusters", "Star clusters", "Amas d'étoiles", &["stars"], Astro, 6),
    cat("exoplanets", "Exoplanets", "Exoplanètes", &["planets"], Astro, 6),
    cat("dwarfs", "Dwarf planets", "Planètes naines", &["planets"], Astro, 6),
    cat("orbits", "Orbits", "Orbites", &["planets"], Astro, 6),
    cat("spirals", "Spiral galaxies", "Galaxies spirales", &["galaxies"], Astro, 6),
    cat("spacetel", "Space telescopes", "Télescopes spatiaux", &["telescopes"], Astro, 6),
    cat("periodic", "Periodic comets", "Comètes périodiques", &["comets"], Astro, 6),
    cat("bynat", "Astronomers by nationality", "Astronomes par nationalité", &["astronomers"], Astro, 6),
    cat("histsci", "History of science", "Histoire des sciences", &["astronomers", "science"], Science, 2),
    cat("optinst", "Optical instruments", "Instruments d'optique", &["telescopes", "science"], Science, 2),
    // depth 3
    cat("frastr", "French astronomers", "Astronomes français", &["bynat"], Astro, 5),
    cat("usastr", "American astronomers", "Astronomes américains", &["bynat"], Astro, 5),
    cat("open", "Open clusters", "Amas ouverts", &["clusters"], Astro, 5),
    cat("globular", "Globular clusters", "Amas globulaires", &["clusters"], Astro, 5),
    cat("hotj", "Hot Jupiters", "Jupiters chauds", &["exoplanets"], Astro, 4),
    cat("scientists", "Scientists", "Scientifiques", &["histsci"], Science, 2),
    cat("optics", "Optics", "Optique", &["optinst"], Science, 2),
    // depth 4
    cat("lyon", "People from Lyon", "Personnalités liées à Lyon", &["frastr"], Bio, 4),
    cat("ohio", "Schools in Ohio", "Écoles de l'Ohio", &["usastr"], Bio, 4),
    cat("physicists", "Physicists", "Physiciens", &["scientists"], Science, 4),
    cat("lenses", "Lenses", "Lentilles", &["optics"], Science, 3),
    cat("gasgiants", "Gas giants", "Géantes gazeuses", &["hotj"], Astro, 4),
    // noise trees, partly reachable from depth 4
    cat("music", "Music", "Musique", &[], Music, 4),
    cat("rock", "Rock bands", "Groupes de rock", &["music"], Music, 8),
    cat("spacerock", "Space rock", "Rock spatial", &["rock"], MusicMeta, 8),
    cat("albums", "Albums", "Albums", &["music"], MusicMeta, 8),
    cat("singers", "Singers", "Chanteurs", &["music"], Music, 6),
    cat("jazz", "Jazz musicians", "Musiciens de jazz", &["music"], MusicMeta, 5),
    cat("lyonmus", "Musicians from Lyon", "Musiciens de Lyon", &["lyon", "jazz"], Music, 4),
    cat("cooking", "Cooking", "Cuisine", &[], Cooking, 5),
    cat("sauces", "Sauces", "Sauces", &["cooking"], Cooking, 6),
    cat("desserts", "Desserts", "Desserts", &["cooking"], Cooking, 6),
    cat("chefs", "Chefs from Lyon", "Chefs de Lyon", &["lyon", "cooking"], Cooking, 3),
    cat("football", "Football", "Football", &[], Football, 4),
    cat("clubs", "Football clubs", "Clubs de football", &["football"], Football, 8),
    cat("footballers", "Footballers", "Footballeurs", &["football"], Football, 8),
];

struct Words {
    astro_core: &'static [&'static str],
    astro: &'static [&'static str],
    astro_meta: &'static [&'static str],
    music: &'static [&'static str],
    cooking: &'static [&'static str],
    football: &'static [&'static str],
    science: &'static [&'static str],
    bio: &'static [&'static str],
    filler: &'static [&'static str],
    glue: &'static [&'static str],
    is_a: &'static str,
    overview: &'static str,
    see_also: &'static str,
}

const EN: Words = Words {
    astro_core: &[
        "star", "stars", "planet", "planets", "galaxy", "galaxies", "telescope", "telescopes", "comet",
        "comets", "astronomer", "astronomers", "cluster", "clusters", "orbit", "orbits", "exoplanet",
    ],
    astro: &[
        "nebula", "asteroid", "moon", "solar", "lunar", "eclipse", "luminosity", "spectrum", "redshift",
        "supernova", "pulsar", "quasar", "constellation", "magnitude", "parallax", "observatory",
        "celestial", "gravity", "radiation", "photometry", "meteor", "cosmic", "dwarf", "giant",
        "variable", "binary", "infrared", "ultraviolet", "astrophysics", "hydrogen", "helium",
        "plasma", "corona", "accretion",
    ],
    astro_meta: &["star", "stars", "galaxy", "planet", "orbit", "moon", "eclipse", "cosmic", "comet", "nebula"],
    music: &[
        "song", "album", "guitar", "band", "concert", "singer", "record", "melody", "rhythm", "chorus",
        "drummer", "bassist", "tour", "studio", "single", "chart", "lyrics", "producer", "festival",
        "orchestra", "piano", "violin", "jazz", "rock", "ballad", "genre", "vocalist",
    ],
    cooking: &[
        "recipe", "sauce", "flour", "butter", "oven", "bake", "dough", "spice", "garlic", "onion",
        "pepper", "tomato", "cheese", "bread", "pastry", "dessert", "soup", "salad", "grill", "roast",
        "kitchen", "ingredient", "vinegar", "olive", "sugar", "honey", "cream",
    ],
    football: &[
        "goal", "match", "striker", "defender", "goalkeeper", "league", "season", "stadium", "coach",
        "penalty", "referee", "tournament", "championship", "midfielder", "transfer", "trophy", "cup",
        "supporter", "derby", "kick", "pitch", "team", "player", "football", "football", "club", "clubs",
        "footballer", "footballers",
    ],
    science: &[
        "experiment", "theory", "laboratory", "physics", "chemistry", "lens", "light", "mirror",
        "optics", "refraction", "wavelength", "prism", "measurement", "equation", "particle", "electron",
        "magnet", "thermodynamics", "microscope", "instrument",
    ],
    bio: &[
        "born", "career", "married", "family", "education", "teacher", "student", "mayor", "writer",
        "painter", "novel", "politician", "merchant", "childhood", "retired", "honorary",
    ],
    filler: &[
        "region", "early", "modern", "large", "small", "known", "important", "famous", "result",
        "system", "example", "number", "development", "structure", "research", "study", "process",
        "surface", "distance", "energy", "material", "form", "type", "name", "series", "area", "level",
        "point", "model", "field", "nature", "value", "range", "change", "country", "city", "member",
        "part", "role", "century", "language", "community", "public", "original", "major", "similar",
        "common", "general", "local",
    ],
    glue: &["the", "of", "and", "is", "a", "in", "with", "was", "by", "for", "its", "as", "on", "to", "from", "which"],
    is_a: "is a",
    overview: "Overview",
    see_also: "See also",
};

const FR: Words = Words {
    astro_core: &[
        "étoile", "étoiles", "planète", "planètes", "galaxie", "galaxies", "télescope", "télescopes",
        "comète", "comètes", "astronome", "astronomes", "amas", "amas", "orbite", "orbites", "exoplanète",
    ],
    astro: &[
        "nébuleuse", "astéroïde", "lune", "solaire", "lunaire", "éclipse", "luminosité", "spectre",
        "décalage", "supernova", "pulsar", "quasar", "constellation", "magnitude", "parallaxe",
        "observatoire", "céleste", "gravité", "rayonnement", "photométrie", "météore", "cosmique",
        "naine", "géante", "variable", "binaire", "infrarouge", "ultraviolet", "astrophysique",
        "hydrogène", "hélium", "plasma", "couronne", "accrétion",
    ],
    astro_meta: &[
        "étoile", "étoiles", "galaxie", "planète", "orbite", "lune", "éclipse", "cosmique", "comète", "nébuleuse",
    ],
    music: &[
        "chanson", "album", "guitare", "groupe", "concert", "chanteur", "disque", "mélodie", "rythme",
        "refrain", "batteur", "bassiste", "tournée", "studio", "single", "classement", "paroles",
        "producteur", "festival", "orchestre", "piano", "violon", "jazz", "rock", "ballade", "genre",
        "vocaliste",
    ],
    cooking: &[
        "recette", "sauce", "farine", "beurre", "four", "cuisson", "pâte", "épice", "ail", "oignon",
        "poivre", "tomate", "fromage", "pain", "pâtisserie", "dessert", "soupe", "salade", "grillade",
        "rôti", "cuisine", "ingrédient", "vinaigre", "olive", "sucre", "miel", "crème",
    ],
    football: &[
        "but", "match", "attaquant", "défenseur", "gardien", "ligue", "saison", "stade", "entraîneur",
        "penalty", "arbitre", "tournoi", "championnat", "milieu", "transfert", "trophée", "coupe",
        "supporter", "derby", "équipe", "joueur", "frappe", "pelouse", "football", "football", "club",
        "clubs", "footballeur", "footballeurs",
    ],
    science: &[
        "expérience", "théorie", "laboratoire", "physique", "chimie", "lentille", "lumière", "miroir",
        "optique", "réfraction", "longueur", "prisme", "mesure", "équation", "particule", "électron",
        "aimant", "thermodynamique", "microscope", "instrument",
    ],
    bio: &[
        "naissance", "carrière", "mariage", "famille", "éducation", "professeur", "étudiant", "maire",
        "écrivain", "peintre", "roman", "politique", "marchand", "enfance", "retraite", "honoraire",
    ],
    filler: &[
        "région", "ancien", "moderne", "grand", "petit", "connu", "important", "célèbre", "résultat",
        "système", "exemple", "nombre", "développement", "structure", "recherche", "étude", "processus",
        "surface", "distance", "énergie", "matériau", "forme", "type", "nom", "série", "zone", "niveau",
        "point", "modèle", "champ", "nature", "valeur", "domaine", "changement", "pays", "ville",
        "membre", "partie", "rôle", "siècle", "langue", "communauté", "public", "original", "majeur",
        "similaire", "commun", "général", "local",
    ],
    glue: &["le", "la", "les", "de", "des", "du", "et", "est", "un", "une", "dans", "avec", "par", "pour", "sur", "qui"],
    is_a: "est un",
    overview: "Présentation",
    see_also: "Voir aussi",
};

fn words(lang: Lang) -> &'static Words {
    match lang {
        Lang::En => &EN,
        Lang::Fr => &FR,
    }
}

const SYLLABLES: &[&str] = &[
    "ka", "vo", "rin", "ta", "lu", "mer", "si", "dor", "nel", "ax", "bri", "cos", "dun", "el", "fa",
    "gor", "hal", "is", "jen", "kel", "lor", "mi", "nor", "ob", "pra", "quo", "ris", "sel", "tor", "ul",
    "vin", "wex", "yar", "zel",
];

struct Article {
    id: u64,
    title: String,
    topic: Topic,
    categories: Vec<String>,
    body_words: Vec<String>,
    name: String,
    links: Vec<(Lang, String)>,
    stub_tag: bool,
}

struct Edition {
    lang: Lang,
    articles: Vec<Article>,
    /// (page id, title without prefix, parent titles, langlink title)
    categories: Vec<(u64, String, Vec<String>, String)>,
}

fn make_name(rng: &mut ChaCha8Rng, used: &mut BTreeSet<String>) -> String {
    loop {
        let n = rng.random_range(2..=3);
        let mut s = String::new();
        for _ in 0..n {
            s.push_str(SYLLABLES.choose(rng).unwrap());
        }
        let mut c = s.chars();
        let name: String = c.next().unwrap().to_uppercase().chain(c).collect();
        if used.insert(name.clone()) {
            return name;
        }
    }
}

/// Core terms dominate, so they head the seed vocabulary.
fn sample_topic_word(rng: &mut ChaCha8Rng, lang: Lang, topic: Topic) -> &'static str {
    let w = words(lang);
    match topic {
        Astro => {
            if rng.random_bool(0.55) {
                w.astro_core.choose(rng).unwrap()
            } else {
                w.astro.choose(rng).unwrap()
            }
        }
        Music => w.music.choose(rng).unwrap(),
        MusicMeta => {
            if rng.random_bool(0.4) {
                w.astro_meta.choose(rng).unwrap()
            } else {
                w.music.choose(rng).unwrap()
            }
        }
        Cooking => w.cooking.choose(rng).unwrap(),
        Football => w.football.choose(rng).unwrap(),
        Science => {
            if rng.random_bool(0.2) {
                w.astro.choose(rng).unwrap()
            } else {
                w.science.choose(rng).unwrap()
            }
        }
        Bio => w.bio.choose(rng).unwrap(),
    }
}

fn body_words(rng: &mut ChaCha8Rng, lang: Lang, topic: Topic, name: &str, len: usize) -> Vec<String> {
    let mix = match topic {
        Bio => WeightedIndex::new([30, 60, 10]).unwrap(),
        _ => WeightedIndex::new([56, 34, 10]).unwrap(),
    };
    let w = words(lang);
    (0..len)
        .map(|_| match mix.sample(rng) {
            0 => sample_topic_word(rng, lang, topic).to_string(),
            1 => w.filler.choose(rng).unwrap().to_string(),
            _ => name.to_string(),
        })
        .collect()
}

fn render_body(rng: &mut ChaCha8Rng, lang: Lang, a: &Article) -> String {
    let w = words(lang);
    let mut out = String::new();
    let _ = writeln!(out, "{{{{Infobox {}\n| name = {}\n| id = {}\n}}}}", a.topic.kind(lang), a.name, a.id);
    let _ = write!(out, "'''{}''' {} [[{}]].", a.name, w.is_a, a.topic.kind(lang));
    for (sentence, chunk) in a.body_words.chunks(7).enumerate() {
        if sentence == 3 {
            let _ = write!(out, "\n\n== {} ==\n", w.overview);
        }
        let mut parts = Vec::with_capacity(chunk.len() * 2);
        for (i, word) in chunk.iter().enumerate() {
            if i > 0 {
                parts.push(w.glue.choose(rng).unwrap().to_string());
            }
            if rng.random_bool(0.08) {
                parts.push(format!("[[{word}]]"));
            } else {
                parts.push(word.clone());
            }
        }
        let mut s = parts.join(" ");
        if let Some(first) = s.get(..1) {
            if first != "[" {
                let upper = first.to_uppercase();
                s.replace_range(..1, &upper);
            }
        }
        out.push(' ');
        out.push_str(&s);
        if rng.random_bool(0.15) {
            let _ = write!(out, "<ref>{{{{cite book|year={}}}}}</ref>", rng.random_range(1850..2015));
        }
        out.push('.');
    }
    let _ = write!(out, "\n\n== {} ==\n* [[{}]]\n\n", w.see_also, a.topic.kind(lang));
    for c in &a.categories {
        let _ = writeln!(out, "[[{}:{}]]", lang.category_ns(), c);
    }
    if a.stub_tag {
        let stub = match lang {
            Lang::En => "Astronomy stubs",
            Lang::Fr => "Ébauche d'astronomie",
        };
        let _ = writeln!(out, "[[{}:{}]]", lang.category_ns(), stub);
    }
    for (l, t) in &a.links {
        let _ = writeln!(out, "[[{}:{}]]", l.code(), t);
    }
    out
}

fn article_title(name: &str, topic: Topic, lang: Lang) -> String {
    format!("{name} ({})", topic.kind(lang))
}

fn build(rng: &mut ChaCha8Rng) -> (Edition, Edition) {
    let mut used = BTreeSet::new();
    let mut en = Edition { lang: Lang::En, articles: Vec::new(), categories: Vec::new() };
    let mut fr = Edition { lang: Lang::Fr, articles: Vec::new(), categories: Vec::new() };
    let title_of = |key: &str, lang: Lang| {
        let c = CATEGORIES.iter().find(|c| c.key == key).expect("known key");
        match lang {
            Lang::En => c.en,
            Lang::Fr => c.fr,
        }
    };
    for (i, c) in CATEGORIES.iter().enumerate() {
        for ed in [&mut en, &mut fr] {
            let lang = ed.lang;
            let parents = c.parents.iter().map(|p| title_of(p, lang).to_string()).collect();
            let link = format!("{}:{}", lang.other().category_ns(), title_of(c.key, lang.other()));
            ed.categories.push((100 + i as u64, title_of(c.key, lang).to_string(), parents, link));
        }
    }

    let mut next_en = 10_001u64;
    let mut next_fr = 20_001u64;
    for c in CATEGORIES {
        for _ in 0..c.articles {
            let twin = rng.random_bool(0.85);
            let name_en = make_name(rng, &mut used);
            let name_fr = if twin { name_en.clone() } else { make_name(rng, &mut used) };
            let len_en = rng.random_range(60..140);
            let len_fr = rng.random_range(60..140);
            let extra = |rng: &mut ChaCha8Rng, lang: Lang| {
                let mut cats = vec![title_of(c.key, lang).to_string()];
                if !c.parents.is_empty() && rng.random_bool(0.2) {
                    cats.push(title_of(c.parents[0], lang).to_string());
                }
                cats
            };
            let cats_en = extra(rng, Lang::En);
            let cats_fr = extra(rng, Lang::Fr);
            let title_en = article_title(&name_en, c.topic, Lang::En);
            let title_fr = article_title(&name_fr, c.topic, Lang::Fr);
            let mut links_en = Vec::new();
            let mut links_fr = Vec::new();
            if twin {
                links_en.push((Lang::Fr, title_fr.clone()));
                if rng.random_bool(0.9) {
                    links_fr.push((Lang::En, title_en.clone()));
                }
            }
            let stub = c.topic == Astro && rng.random_bool(0.1);
            let words_en = body_words(rng, Lang::En, c.topic, &name_en, len_en);
            let words_fr = body_words(rng, Lang::Fr, c.topic, &name_fr, len_fr);
            en.articles.push(Article {
                id: next_en,
                title: title_en,
                topic: c.topic,
                categories: cats_en,
                body_words: words_en,
                name: name_en,
                links: links_en,
                stub_tag: stub,
            });
            fr.articles.push(Article {
                id: next_fr,
                title: title_fr,
                topic: c.topic,
                categories: cats_fr,
                body_words: words_fr,
                name: name_fr,
                links: links_fr,
                stub_tag: stub,
            });
            next_en += 1;
            next_fr += 1;
        }
    }
    (en, fr)
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

fn page(out: &mut String, title: &str, ns: i32, id: u64, text: &str, redirect: Option<&str>) {
    let _ = writeln!(out, "  <page>\n    <title>{}</title>\n    <ns>{ns}</ns>\n    <id>{id}</id>", escape(title));
    if let Some(r) = redirect {
        let _ = writeln!(out, "    <redirect title=\"{}\" />", escape(r));
    }
    let _ = writeln!(
        out,
        "    <revision>\n      <id>{}</id>\n      <text xml:space=\"preserve\">{}</text>\n    </revision>\n  </page>",
        id + 900_000,
        escape(text)
    );
}

fn render(rng: &mut ChaCha8Rng, ed: &Edition, conflict_target: Option<&str>) -> String {
    let lang = ed.lang;
    let (sitename, category, template, user, redirect, disambig, dis_suffix, extra_names) = match lang {
        Lang::En => ("Wikipedia", "Category", "Template", "User", "#REDIRECT", "{{disambiguation}}", "(disambiguation)", ["Mercury", "Vega"]),
        Lang::Fr => ("Wikipédia", "Catégorie", "Modèle", "Utilisateur", "#REDIRECTION", "{{homonymie}}", "(homonymie)", ["Mercure", "Véga"]),
    };
    let mut out = String::new();
    let _ = writeln!(
        out,
        "<mediawiki xmlns=\"http://www.mediawiki.org/xml/export-0.10/\" version=\"0.10\" xml:lang=\"{}\">",
        lang.code()
    );
    let _ = writeln!(
        out,
        "  <siteinfo>\n    <sitename>{sitename}</sitename>\n    <dbname>{}wiki</dbname>\n    <namespaces>\n      \
         <namespace key=\"0\" case=\"first-letter\" />\n      <namespace key=\"2\" case=\"first-letter\">{user}</namespace>\n      \
         <namespace key=\"10\" case=\"first-letter\">{template}</namespace>\n      \
         <namespace key=\"14\" case=\"first-letter\">{category}</namespace>\n    </namespaces>\n  </siteinfo>",
        lang.code()
    );
    for (id, title, parents, link) in &ed.categories {
        let mut text = String::new();
        for p in parents {
            let _ = writeln!(text, "[[{category}:{p}]]");
        }
        let _ = writeln!(text, "[[{}:{link}]]", lang.other().code());
        page(&mut out, &format!("{category}:{title}"), 14, *id, &text, None);
    }
    for (i, a) in ed.articles.iter().enumerate() {
        let mut body = render_body(rng, lang, a);
        // A second claim on an already linked title is dropped at ingest.
        if i == 3 {
            if let Some(t) = conflict_target {
                body.push_str(&format!("[[{}:{t}]]\n", lang.other().code()));
            }
        }
        page(&mut out, &a.title, 0, a.id, &body, None);
    }
    let mut id = 90_001;
    for a in ed.articles.iter().step_by(97).take(3) {
        let alias = format!("{} {}", a.name, a.topic.kind(lang));
        let text = format!("{redirect} [[{}]]", a.title);
        let tag = if id % 2 == 1 { Some(a.title.as_str()) } else { None };
        page(&mut out, &alias, 0, id, &text, tag);
        id += 1;
    }
    page(
        &mut out,
        &format!("{} {dis_suffix}", extra_names[0]),
        0,
        id,
        &format!("'''{}''' may refer to:\n* [[{}]]\n* [[{}]]", extra_names[0], ed.articles[0].title, ed.articles[1].title),
        None,
    );
    page(
        &mut out,
        extra_names[1],
        0,
        id + 1,
        &format!("'''{}''' may refer to:\n* [[{}]]\n\n{disambig}", extra_names[1], ed.articles[2].title),
        None,
    );
    page(&mut out, &format!("{template}:Infobox"), 10, id + 2, "{{{name}}}", None);
    page(&mut out, &format!("{user}:Example"), 2, id + 3, "Sandbox [[Category:Astronomy]]", None);
    out.push_str("</mediawiki>\n");
    out
}

fn main() {
    let dir = PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| "crates/core/tests/fixtures/minidump".into()));
    fs::create_dir_all(&dir).expect("create output dir");
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let (en, fr) = build(&mut rng);
    // Points at the fr title already claimed by en article 0.
    let conflict = en.articles[0].links.first().map(|(_, t)| t.clone());
    let en_xml = render(&mut rng, &en, conflict.as_deref());
    let fr_xml = render(&mut rng, &fr, None);
    fs::write(dir.join("enwiki-mini.xml"), en_xml).expect("write en");
    fs::write(dir.join("frwiki-mini.xml"), fr_xml).expect("write fr");
    let mut truth = String::from("lang\tarticle_id\ttopic\n");
    for ed in [&en, &fr] {
        for a in &ed.articles {
            let _ = writeln!(truth, "{}\t{}\t{}", ed.lang.code(), a.id, a.topic.label());
        }
    }
    fs::write(dir.join("truth.tsv"), truth).expect("write truth");
    println!(
        "wrote {} en and {} fr articles, {} categories per edition",
        en.articles.len(),
        fr.articles.len(),
        en.categories.len()
    );
}
