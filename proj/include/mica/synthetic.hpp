#ifndef MICA_SYNTHETIC_HPP
#define MICA_SYNTHETIC_HPP

// Templated court-decision-style documents for benchmarks and fixtures.
//
// Every document introduces its parties (PER) and court members or
// attorneys (PRO) in formulaic sentences, with dates of birth (DATE) and
// birthplaces or residences (LOC), then mentions the same people again in
// sentences where the surrounding words give little away. Surnames are
// built from syllables and upper-cased, so most of them are new in any held
// out split; first names and cities come from fixed lexicons.

#include <array>
#include <cstdint>
#include <random>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "mica/corpus.hpp"
#include "mica/error.hpp"

namespace mica::synthetic {

struct SyntheticConfig {
  std::size_t documents = 200;
  std::size_t min_sentences = 6;
  std::size_t max_sentences = 12;
  std::uint64_t seed = 1;
};

namespace detail {

inline constexpr std::array<std::string_view, 48> kFirstNames = {
    "Jean",     "Pierre",   "Marie",    "Claire",  "Jérémy",    "Léo",       "Sophie",   "Thomas",
    "Nicolas",  "Isabelle", "Camille",  "Julien",  "Céline",    "Antoine",   "Hélène",   "Mathieu",
    "Élodie",   "François", "Nathalie", "Laurent", "Aurélie",   "Sébastien", "Valérie",  "Olivier",
    "Émilie",   "Sandrine", "Guillaume", "Patricia", "Stéphane", "Caroline", "Benoît",   "Chloé",
    "Maxime",   "Manon",    "Hugo",     "Inès",    "Lucas",     "Zoé",       "Gabriel",  "Louise",
    "Raphaël",  "Juliette", "Arthur",   "Lina",    "Adrien",    "Margaux",   "Étienne",  "Agathe"};

inline constexpr std::array<std::string_view, 40> kSyllables = {
    "ber", "nard", "la", "ver", "gne", "mar", "tin", "du",  "pont", "ro",  "che", "mo",   "reau", "gi",
    "rard", "le",  "fe", "vre", "ker", "va",  "lec", "ri",  "chard", "bou", "vier", "pe", "tit",  "gau",
    "fon", "taine", "mal", "let", "char", "col", "lin", "dan", "ton", "ba",  "zin", "sa"};

inline constexpr std::array<std::string_view, 36> kCities = {
    "Lyon",      "Paris",    "Marseille", "Toulouse",  "Nantes",   "Bordeaux",      "Lille",
    "Rennes",    "Grenoble", "Dijon",     "Angers",    "Nîmes",    "Brest",         "Limoges",
    "Amiens",    "Metz",     "Besançon",  "Orléans",   "Rouen",    "Caen",          "Nancy",
    "Avignon",   "Poitiers", "Pau",       "Montpellier", "Strasbourg", "Toulon",    "Reims",
    "Perpignan", "Béziers",  "Valence",   "Quimper",   "Colmar",   "Annecy",        "Chambéry",
    "Saint-Étienne"};

inline constexpr std::array<std::string_view, 12> kMonths = {
    "janvier", "février", "mars", "avril", "mai", "juin", "juillet", "août", "septembre", "octobre",
    "novembre", "décembre"};

inline constexpr std::array<std::string_view, 4> kProRoles = {"président", "conseiller", "greffier", "avocat"};

struct Person {
  std::string first;
  std::string last;
  std::vector<std::string> birth_date;
  std::string birthplace;
  std::string residence;
  bool woman = false;
};

class Builder {
 public:
  explicit Builder(std::uint64_t seed) : rng_(seed) {}

  std::size_t below(std::size_t n) { return static_cast<std::size_t>(rng_() % n); }
  bool chance(double p) { return static_cast<double>(rng_() >> 11) * 0x1.0p-53 < p; }
  template <class Array>
  std::string pick(const Array& a) {
    return std::string(a[below(a.size())]);
  }

  std::string surname() {
    std::string out;
    const std::size_t parts = 2 + below(2);
    for (std::size_t i = 0; i < parts; ++i) out += pick(kSyllables);
    for (auto& c : out) c = static_cast<char>(c - 'a' + 'A');
    return out;
  }

  Person person() {
    Person p;
    p.first = pick(kFirstNames);
    p.last = surname();
    p.birth_date = {std::to_string(1 + below(28)), pick(kMonths), std::to_string(1940 + below(75))};
    p.birthplace = pick(kCities);
    p.residence = pick(kCities);
    p.woman = chance(0.5);
    return p;
  }

  std::string year() { return std::to_string(2000 + below(20)); }
  std::string filing_date() {
    const std::string day = std::to_string(1 + below(28));
    const std::string month = pick(kMonths);
    return day + " " + month + " " + std::to_string(2010 + below(10));
  }

  // Sentence assembly.
  void words(std::string_view text) {
    std::size_t start = 0;
    while (start < text.size()) {
      auto end = text.find(' ', start);
      if (end == std::string_view::npos) end = text.size();
      if (end > start) push(text.substr(start, end - start), Label::outside());
      start = end + 1;
    }
  }
  void entity(EntityType type, const std::vector<std::string>& tokens) {
    for (std::size_t i = 0; i < tokens.size(); ++i) push(tokens[i], i == 0 ? Label::begin(type) : Label::inside(type));
  }
  void full_name(EntityType type, const Person& p) { entity(type, {p.first, p.last}); }
  // Surname, first name or both, as later mentions vary.
  void some_name(EntityType type, const Person& p) {
    const std::size_t form = below(4);
    if (form == 0) entity(type, {p.first});
    else if (form == 1) full_name(type, p);
    else entity(type, {p.last});
  }
  void date(const Person& p) { entity(EntityType::DATE, p.birth_date); }
  void city(std::string_view name) { entity(EntityType::LOC, {std::string(name)}); }

  Sentence take() {
    Sentence s;
    s.tokens = std::move(tokens_);
    tokens_.clear();
    return s;
  }

 private:
  void push(std::string_view surface, Label label) {
    tokens_.push_back(Token{std::string(surface), label, std::nullopt});
  }

  std::mt19937_64 rng_;
  std::vector<Token> tokens_;
};

inline void introduce_party(Builder& b, const Person& p) {
  switch (b.below(3)) {
    case 0:
      b.words(p.woman ? "Madame" : "Monsieur");
      b.full_name(EntityType::PER, p);
      b.words(p.woman ? ", née le" : ", né le");
      b.date(p);
      b.words("à");
      b.city(p.birthplace);
      b.words(", demeurant à");
      b.city(p.residence);
      b.words(",");
      break;
    case 1:
      b.words(p.woman ? "Mme" : "M.");
      b.full_name(EntityType::PER, p);
      b.words(p.woman ? ", née le" : ", né le");
      b.date(p);
      b.words(p.woman ? ", domiciliée à" : ", domicilié à");
      b.city(p.residence);
      b.words(p.woman ? ", appelante ." : ", appelant .");
      break;
    default:
      b.words("Entre");
      b.words(p.woman ? "Madame" : "Monsieur");
      b.full_name(EntityType::PER, p);
      b.words(", demeurant à");
      b.city(p.residence);
      b.words(p.woman ? ", intimée , d' une part ." : ", intimé , d' une part .");
      break;
  }
}

inline void introduce_pro(Builder& b, const Person& p) {
  switch (b.below(3)) {
    case 0:
      b.words("Représenté par Maître");
      b.full_name(EntityType::PRO, p);
      b.words(", avocat au barreau .");
      break;
    case 1:
      b.words("Composition de la cour lors des débats :");
      b.full_name(EntityType::PRO, p);
      b.words(", " + b.pick(kProRoles) + " .");
      break;
    default:
      b.words("Greffier lors des débats :");
      b.full_name(EntityType::PRO, p);
      b.words(".");
      break;
  }
}

// A later mention whose surrounding words are shared with entity-free
// sentences (see filler), so the context alone is not decisive.
inline void mention_party(Builder& b, const Person& p, const Person& other) {
  const auto per = EntityType::PER;
  switch (b.below(10)) {
    case 0: b.words("Attendu que"); b.some_name(per, p); b.words("ne justifie pas de sa situation ."); break;
    case 1: b.words("Considérant que"); b.some_name(per, p); b.words("ne rapporte pas la preuve de ses ressources ."); break;
    case 2: b.words("Il résulte des pièces que"); b.some_name(per, p); b.words("a quitté le domicile en " + b.year() + " ."); break;
    case 3: b.some_name(per, p); b.words("sollicite la confirmation du jugement déféré ."); break;
    case 4: b.words("La demande formée par"); b.some_name(per, p); b.words("sera rejetée ."); break;
    case 5: b.words("Elle indique que"); b.some_name(per, p); b.words("et"); b.some_name(per, other); b.words("se sont séparés ."); break;
    case 6: b.words("Selon"); b.some_name(per, p); b.words(", la pension alimentaire doit être révisée ."); break;
    case 7: b.some_name(per, p); b.words("et"); b.some_name(per, other); b.words("ont exprimé la volonté de rester auprès de leur mère ."); break;
    case 8: b.words("Il est constant que"); b.some_name(per, p); b.words("perçoit un salaire mensuel ."); break;
    default: b.some_name(per, p); b.words("verse aux débats plusieurs attestations ."); break;
  }
}

// Repeats a party's date of birth or place.
inline void recall_party(Builder& b, const Person& p) {
  switch (b.below(3)) {
    case 0:
      b.entity(EntityType::PER, {p.first});
      b.words(p.woman ? ", née le" : ", né le");
      b.date(p);
      b.words(", réside à");
      b.city(p.residence);
      b.words("depuis " + b.year() + " .");
      break;
    case 1:
      b.words("Il n' est pas contesté que");
      b.some_name(EntityType::PER, p);
      b.words("demeure à");
      b.city(p.residence);
      b.words(".");
      break;
    default:
      b.words("L' enfant");
      b.entity(EntityType::PER, {p.first});
      b.words("est né le");
      b.date(p);
      b.words("à");
      b.city(p.birthplace);
      b.words(".");
      break;
  }
}

inline void mention_pro(Builder& b, const Person& p) {
  switch (b.below(4)) {
    case 0: b.words("Maître"); b.some_name(EntityType::PRO, p); b.words("soutient que l' appel est recevable ."); break;
    case 1: b.words("Le présent arrêt a été signé par"); b.full_name(EntityType::PRO, p); b.words("."); break;
    case 2: b.words("Conclusions de"); b.some_name(EntityType::PRO, p); b.words("déposées le " + b.filing_date() + " ."); break;
    default: b.words("Selon"); b.some_name(EntityType::PRO, p); b.words(", l' appel est recevable ."); break;
  }
}

inline void filler(Builder& b) {
  static constexpr std::array<std::string_view, 16> kFiller = {
      "Par ces motifs , la Cour confirme le jugement en toutes ses dispositions .",
      "Les dépens sont à la charge de l' appelant .",
      "Vu les articles 700 et 696 du Code de procédure civile .",
      "Sur la demande de dommages et intérêts .",
      "La Cour statue publiquement et contradictoirement .",
      "Le Tribunal a fait une exacte appréciation des faits .",
      "Il convient de faire droit à la demande .",
      "Sur la résidence habituelle des enfants .",
      "Déboute les parties de leurs autres demandes .",
      "Madame la Présidente a donné lecture du rapport .",
      "Attendu que la demande ne justifie pas une expertise .",
      "Il résulte des pièces que le jugement a été signifié .",
      "La demande formée par l' appelante sera rejetée .",
      "Selon le Code civil , la pension alimentaire doit être révisée .",
      "Elle indique que les parties se sont séparées .",
      "Le Conseil verse aux débats plusieurs attestations ."};
  b.words(b.pick(kFiller));
}

}  // namespace detail

inline Document document(detail::Builder& b, const std::string& id, const SyntheticConfig& config) {
  using detail::Person;
  const std::size_t n_parties = 1 + b.below(3);
  const std::size_t n_pros = 1 + b.below(2);
  std::vector<Person> parties, pros;
  for (std::size_t i = 0; i < n_parties; ++i) parties.push_back(b.person());
  for (std::size_t i = 0; i < n_pros; ++i) pros.push_back(b.person());

  const std::size_t span = config.max_sentences - config.min_sentences + 1;
  const std::size_t total = config.min_sentences + b.below(span);

  Document doc;
  doc.id = id;
  auto emit = [&] {
    Sentence s = b.take();
    s.index = doc.sentences.size();
    doc.sentences.push_back(std::move(s));
  };
  for (const auto& p : parties) {
    if (doc.sentences.size() >= total) break;
    detail::introduce_party(b, p);
    emit();
  }
  for (const auto& p : pros) {
    if (doc.sentences.size() >= total) break;
    detail::introduce_pro(b, p);
    emit();
  }
  while (doc.sentences.size() < total) {
    const std::size_t roll = b.below(20);
    const auto& p = parties[b.below(parties.size())];
    if (roll < 9) {
      const auto& other = parties[b.below(parties.size())];
      detail::mention_party(b, p, other);
    } else if (roll < 12) {
      detail::recall_party(b, p);
    } else if (roll < 15) {
      detail::mention_pro(b, pros[b.below(pros.size())]);
    } else {
      detail::filler(b);
    }
    emit();
  }
  return doc;
}

/// A corpus of `config.documents` documents with gold labels.
inline Corpus generate(const SyntheticConfig& config) {
  if (config.min_sentences == 0 || config.max_sentences < config.min_sentences)
    throw Error("invalid sentence-count range");
  detail::Builder b(config.seed);
  Corpus corpus;
  for (std::size_t d = 0; d < config.documents; ++d)
    corpus.documents.push_back(document(b, "synth-" + std::to_string(d), config));
  return corpus;
}

}  // namespace mica::synthetic

#endif  // MICA_SYNTHETIC_HPP
