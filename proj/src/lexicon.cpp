#include "depscan/lexicon.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>
#include <set>
#include <sstream>

#include "depscan/error.hpp"
#include "depscan/hash.hpp"
#include "json_util.hpp"

namespace depscan {
namespace {

using nlohmann::json;

bool term_order(const LexiconTerm& a, const LexiconTerm& b) {
  if (a.similarity != b.similarity) return a.similarity > b.similarity;
  return a.term < b.term;
}

std::string normalize_term(std::string_view raw) {
  return join_tokens(tokenize(raw).tokens);
}

std::vector<std::string> normalize_seeds(std::span<const std::string> seeds) {
  if (seeds.empty()) {
    throw Error(ErrorKind::empty_seeds, "category needs at least one seed");
  }
  std::vector<std::string> out;
  for (const auto& seed : seeds) {
    std::string term = normalize_term(seed);
    if (term.empty()) {
      throw Error(ErrorKind::empty_term,
                  "seed '" + seed + "' has no tokens");
    }
    if (std::find(out.begin(), out.end(), term) == out.end()) {
      out.push_back(std::move(term));
    }
  }
  return out;
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t pos = 0;
  while (pos < line.size()) {
    while (pos < line.size() && (line[pos] == ' ' || line[pos] == '\t' ||
                                 line[pos] == '\r')) {
      ++pos;
    }
    const std::size_t start = pos;
    while (pos < line.size() && line[pos] != ' ' && line[pos] != '\t' &&
           line[pos] != '\r') {
      ++pos;
    }
    if (pos > start) fields.push_back(line.substr(start, pos - start));
  }
  return fields;
}

json category_to_json(const LexiconCategory& category) {
  json terms = json::array();
  for (const auto& t : category.terms()) {
    terms.push_back(json::array({t.term, t.similarity}));
  }
  return json{{"name", category.name()},
              {"seeds", category.seeds()},
              {"terms", std::move(terms)}};
}

LexiconCategory category_from_json(const json& doc) {
  std::vector<LexiconTerm> terms;
  const json& raw_terms = detail::require(doc, "terms");
  if (!raw_terms.is_array()) {
    throw Error(ErrorKind::corrupt_payload, "'terms' must be an array");
  }
  try {
    for (const auto& entry : raw_terms) {
      terms.push_back(
          {entry.at(0).get<std::string>(), entry.at(1).get<double>()});
    }
  } catch (const json::exception& e) {
    throw Error(ErrorKind::corrupt_payload,
                std::string("malformed lexicon term: ") + e.what());
  }
  return LexiconCategory(detail::require_as<std::string>(doc, "name"),
                         detail::require_as<std::vector<std::string>>(doc, "seeds"),
                         std::move(terms));
}

}  // namespace

EmbeddingTable::EmbeddingTable(std::size_t dimension) : dimension_(dimension) {
  if (dimension == 0) {
    throw Error(ErrorKind::invalid_argument,
                "embedding dimension must be positive");
  }
}

bool EmbeddingTable::insert(std::string word, std::span<const double> values) {
  if (values.size() != dimension_) {
    throw Error(ErrorKind::dimension_mismatch,
                "vector for '" + word + "' has " +
                    std::to_string(values.size()) + " components, expected " +
                    std::to_string(dimension_));
  }
  double sum_sq = 0.0;
  for (const double v : values) {
    if (!std::isfinite(v)) {
      throw Error(ErrorKind::invalid_argument,
                  "vector for '" + word + "' has a non-finite component");
    }
    sum_sq += v * v;
  }
  if (index_.contains(word)) return false;
  index_.emplace(word, words_.size());
  terms_.push_back(normalize_term(word));
  words_.push_back(std::move(word));
  data_.insert(data_.end(), values.begin(), values.end());
  norms_.push_back(std::sqrt(sum_sq));
  return true;
}

std::span<const double> EmbeddingTable::vector(std::size_t i) const {
  return std::span<const double>(data_).subspan(i * dimension_, dimension_);
}

std::optional<std::size_t> EmbeddingTable::find(std::string_view word) const {
  const auto it = index_.find(std::string(word));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

EmbeddingTable load_embeddings(std::istream& in) {
  std::optional<EmbeddingTable> table;
  std::string line;
  std::size_t line_no = 0;
  std::vector<double> values;
  while (std::getline(in, line)) {
    ++line_no;
    const auto fields = split_fields(line);
    if (fields.empty()) continue;
    if (fields.size() < 2) {
      throw Error(ErrorKind::parse_error, "line has a word but no vector",
                  line_no);
    }
    values.clear();
    for (std::size_t i = 1; i < fields.size(); ++i) {
      double v = 0.0;
      const auto* first = fields[i].data();
      const auto* last = first + fields[i].size();
      const auto [ptr, ec] = std::from_chars(first, last, v);
      if (ec != std::errc{} || ptr != last || !std::isfinite(v)) {
        throw Error(ErrorKind::parse_error,
                    "non-numeric component '" + std::string(fields[i]) + "'",
                    line_no);
      }
      values.push_back(v);
    }
    if (!table) table.emplace(values.size());
    if (values.size() != table->dimension()) {
      throw Error(ErrorKind::dimension_mismatch,
                  "expected " + std::to_string(table->dimension()) +
                      " components, found " + std::to_string(values.size()),
                  line_no);
    }
    table->insert(std::string(fields[0]), values);
  }
  if (!table) {
    throw Error(ErrorKind::parse_error, "embedding source contains no vectors");
  }
  return std::move(*table);
}

LexiconCategory::LexiconCategory(std::string name,
                                 std::vector<std::string> seeds,
                                 std::vector<LexiconTerm> terms)
    : name_(std::move(name)), seeds_(std::move(seeds)), terms_(std::move(terms)) {
  if (seeds_.empty()) {
    throw Error(ErrorKind::empty_seeds,
                "category '" + name_ + "' has no seeds");
  }
  std::sort(terms_.begin(), terms_.end(), term_order);
  std::set<std::string_view> seen;
  for (const auto& t : terms_) {
    if (!std::isfinite(t.similarity) || t.similarity < -1.0 ||
        t.similarity > 1.0) {
      throw Error(ErrorKind::invalid_argument,
                  "similarity of '" + t.term + "' outside [-1, 1]");
    }
    if (!seen.insert(t.term).second) {
      throw Error(ErrorKind::invalid_argument,
                  "duplicate term '" + t.term + "' in category '" + name_ + "'");
    }
    TokenStream phrase = tokenize(t.term);
    if (phrase.empty()) {
      throw Error(ErrorKind::empty_term,
                  "term '" + t.term + "' has no tokens");
    }
    phrases_.push_back(std::move(phrase.tokens));
  }
  for (const auto& seed : seeds_) {
    const auto it = std::find_if(terms_.begin(), terms_.end(),
                                 [&](const auto& t) { return t.term == seed; });
    if (it == terms_.end() || it->similarity != 1.0) {
      throw Error(ErrorKind::invalid_argument,
                  "seed '" + seed + "' must appear with similarity 1.0");
    }
  }
}

bool LexiconCategory::contains(std::string_view term) const {
  return std::any_of(terms_.begin(), terms_.end(),
                     [&](const auto& t) { return t.term == term; });
}

LexiconCategory expand_category(std::string name,
                                std::span<const std::string> seeds,
                                const EmbeddingTable& table, int top_k,
                                double min_sim) {
  if (top_k < 0) {
    throw Error(ErrorKind::invalid_argument, "top_k must be >= 0");
  }
  if (!(min_sim >= -1.0 && min_sim <= 1.0)) {
    throw Error(ErrorKind::invalid_argument, "min_sim must lie in [-1, 1]");
  }
  const std::vector<std::string> normalized = normalize_seeds(seeds);

  std::map<std::string, double> best;
  const std::size_t dim = table.dimension();
  std::vector<double> query(dim);
  std::vector<std::pair<double, std::size_t>> candidates;

  for (const auto& seed : normalized) {
    if (top_k == 0) break;
    std::fill(query.begin(), query.end(), 0.0);
    std::size_t found = 0;
    for (const auto& token : tokenize(seed).tokens) {
      if (const auto idx = table.find(token)) {
        const auto v = table.vector(*idx);
        for (std::size_t d = 0; d < dim; ++d) query[d] += v[d];
        ++found;
      }
    }
    if (found == 0) continue;
    double query_norm = 0.0;
    for (auto& q : query) {
      q /= static_cast<double>(found);
      query_norm += q * q;
    }
    query_norm = std::sqrt(query_norm);

    candidates.clear();
    for (std::size_t i = 0; i < table.size(); ++i) {
      const std::string& term = table.term(i);
      if (term.empty() || term == seed) continue;
      double sim = 0.0;
      if (query_norm > 0.0 && table.norm(i) > 0.0) {
        const auto v = table.vector(i);
        double dot = 0.0;
        for (std::size_t d = 0; d < dim; ++d) dot += query[d] * v[d];
        sim = std::clamp(dot / (query_norm * table.norm(i)), -1.0, 1.0);
      }
      if (sim >= min_sim) candidates.emplace_back(sim, i);
    }
    std::sort(candidates.begin(), candidates.end(),
              [&](const auto& a, const auto& b) {
                if (a.first != b.first) return a.first > b.first;
                return table.term(a.second) < table.term(b.second);
              });
    std::set<std::string_view> taken;
    for (const auto& [sim, i] : candidates) {
      if (taken.size() == static_cast<std::size_t>(top_k)) break;
      const std::string& term = table.term(i);
      if (!taken.insert(term).second) continue;
      auto [it, inserted] = best.emplace(term, sim);
      if (!inserted) it->second = std::max(it->second, sim);
    }
  }
  for (const auto& seed : normalized) best[seed] = 1.0;

  std::vector<LexiconTerm> terms;
  terms.reserve(best.size());
  for (auto& [term, sim] : best) terms.push_back({term, sim});
  return LexiconCategory(std::move(name), normalized, std::move(terms));
}

LexiconCategory seed_category(std::string name,
                              std::span<const std::string> seeds) {
  std::vector<std::string> normalized = normalize_seeds(seeds);
  std::vector<LexiconTerm> terms;
  for (const auto& seed : normalized) terms.push_back({seed, 1.0});
  return LexiconCategory(std::move(name), std::move(normalized),
                         std::move(terms));
}

double analyze(const TokenIndex& index, const LexiconCategory& category) {
  if (index.source_len() == 0) return 0.0;
  std::size_t hits = 0;
  for (const auto& phrase : category.phrases()) hits += index.count(phrase);
  return static_cast<double>(hits) / static_cast<double>(index.source_len());
}

double analyze(const TokenStream& stream, const LexiconCategory& category) {
  if (stream.empty()) return 0.0;
  return analyze(TokenIndex(stream), category);
}

SeedConfig default_seed_config() {
  SeedConfig config;
  config.symptoms = {
      {"sleep", {"insomnia", "sleep", "sleepless", "restless"}},
      {"appetite", {"appetite", "weight-loss", "weight loss", "hungry"}},
      {"loneliness", {"lonely", "alone", "isolated"}},
      {"crying", {"cry", "crying", "tears", "sobbing"}},
      {"sadness", {"sadness", "depressed", "unhappy", "miserable"}},
      {"hopelessness", {"hopeless", "failure", "pointless"}},
      {"self-hate", {"self-hate", "worthless", "hate myself"}},
      {"fear", {"fear", "scared", "afraid", "fearful"}},
      {"fatigue", {"tired", "exhausted", "fatigue", "effort"}},
  };
  config.positive = {"happy", "joy", "love", "hope"};
  config.negative = {"sad", "hate", "pain", "cry"};
  return config;
}

nlohmann::json to_json(const SeedConfig& config) {
  json symptoms = json::array();
  for (const auto& group : config.symptoms) {
    symptoms.push_back({{"name", group.name}, {"seeds", group.seeds}});
  }
  return json{{"version", detail::kSchemaVersion},
              {"kind", "seed_config"},
              {"top_k", config.expansion.top_k},
              {"min_sim", config.expansion.min_sim},
              {"symptoms", std::move(symptoms)},
              {"positive", config.positive},
              {"negative", config.negative}};
}

SeedConfig seed_config_from_json(const nlohmann::json& doc) {
  detail::check_header(doc, "seed_config");
  SeedConfig config;
  ExpansionParams defaults;
  config.expansion.top_k = doc.value("top_k", defaults.top_k);
  config.expansion.min_sim = doc.value("min_sim", defaults.min_sim);
  const json& symptoms = detail::require(doc, "symptoms");
  if (!symptoms.is_array()) {
    throw Error(ErrorKind::corrupt_payload, "'symptoms' must be an array");
  }
  for (const auto& group : symptoms) {
    config.symptoms.push_back(
        {detail::require_as<std::string>(group, "name"),
         detail::require_as<std::vector<std::string>>(group, "seeds")});
  }
  config.positive = detail::require_as<std::vector<std::string>>(doc, "positive");
  config.negative = detail::require_as<std::vector<std::string>>(doc, "negative");
  return config;
}

LexiconBundle::LexiconBundle(std::vector<LexiconCategory> symptom_categories,
                             LexiconCategory positive, LexiconCategory negative,
                             ExpansionParams expansion)
    : symptoms_(std::move(symptom_categories)),
      positive_(std::move(positive)),
      negative_(std::move(negative)),
      expansion_(expansion) {
  if (symptoms_.empty()) {
    throw Error(ErrorKind::invalid_argument,
                "lexicon needs at least one symptom category");
  }
  for (const auto& t : positive_.terms()) {
    if (negative_.contains(t.term)) {
      throw Error(ErrorKind::overlapping_lexicons,
                  "term '" + t.term + "' is both positive and negative");
    }
  }
  std::set<std::string> all;
  for (const auto& category : symptoms_) {
    for (const auto& t : category.terms()) all.insert(t.term);
  }
  symptom_terms_.assign(all.begin(), all.end());
  for (const auto& term : symptom_terms_) {
    symptom_phrases_.push_back(tokenize(term).tokens);
  }
  hash_ = sha256_hex(to_json(*this).dump());
}

LexiconBundle build_bundle(const SeedConfig& config,
                           const EmbeddingTable* table) {
  ExpansionParams used = config.expansion;
  if (table == nullptr) used.top_k = 0;
  const auto expand = [&](const std::string& name,
                          const std::vector<std::string>& seeds) {
    return table ? expand_category(name, seeds, *table, used.top_k, used.min_sim)
                 : seed_category(name, seeds);
  };

  std::vector<LexiconCategory> symptoms;
  for (const auto& group : config.symptoms) {
    symptoms.push_back(expand(group.name, group.seeds));
  }
  LexiconCategory positive = expand("positive", config.positive);
  LexiconCategory negative = expand("negative", config.negative);

  std::map<std::string, double> neg_sim;
  for (const auto& t : negative.terms()) neg_sim.emplace(t.term, t.similarity);
  const auto is_seed = [](const LexiconCategory& c, const std::string& term) {
    return std::find(c.seeds().begin(), c.seeds().end(), term) != c.seeds().end();
  };

  std::vector<LexiconTerm> pos_terms;
  std::set<std::string> drop_from_negative;
  for (const auto& t : positive.terms()) {
    const auto it = neg_sim.find(t.term);
    if (it == neg_sim.end()) {
      pos_terms.push_back(t);
      continue;
    }
    const bool pos_seed = is_seed(positive, t.term);
    const bool neg_seed = is_seed(negative, t.term);
    if (pos_seed && neg_seed) {
      throw Error(ErrorKind::overlapping_lexicons,
                  "'" + t.term + "' is seeded as both positive and negative");
    }
    if (pos_seed || (!neg_seed && t.similarity > it->second)) {
      pos_terms.push_back(t);
      drop_from_negative.insert(t.term);
    } else if (!neg_seed && t.similarity == it->second) {
      drop_from_negative.insert(t.term);
    }
  }
  std::vector<LexiconTerm> neg_terms;
  for (const auto& t : negative.terms()) {
    if (!drop_from_negative.contains(t.term)) neg_terms.push_back(t);
  }

  return LexiconBundle(
      std::move(symptoms),
      LexiconCategory(positive.name(), positive.seeds(), std::move(pos_terms)),
      LexiconCategory(negative.name(), negative.seeds(), std::move(neg_terms)),
      used);
}

nlohmann::json to_json(const LexiconBundle& bundle) {
  json symptoms = json::array();
  for (const auto& c : bundle.symptom_categories()) {
    symptoms.push_back(category_to_json(c));
  }
  return json{{"version", detail::kSchemaVersion},
              {"kind", "lexicon"},
              {"expansion",
               {{"top_k", bundle.expansion().top_k},
                {"min_sim", bundle.expansion().min_sim}}},
              {"symptom_categories", std::move(symptoms)},
              {"positive", category_to_json(bundle.positive())},
              {"negative", category_to_json(bundle.negative())}};
}

LexiconBundle lexicon_from_json(const nlohmann::json& doc) {
  detail::check_header(doc, "lexicon");
  const json& expansion = detail::require(doc, "expansion");
  ExpansionParams params{detail::require_as<int>(expansion, "top_k"),
                         detail::require_as<double>(expansion, "min_sim")};
  const json& raw = detail::require(doc, "symptom_categories");
  if (!raw.is_array()) {
    throw Error(ErrorKind::corrupt_payload,
                "'symptom_categories' must be an array");
  }
  std::vector<LexiconCategory> symptoms;
  for (const auto& c : raw) symptoms.push_back(category_from_json(c));
  return LexiconBundle(std::move(symptoms),
                       category_from_json(detail::require(doc, "positive")),
                       category_from_json(detail::require(doc, "negative")),
                       params);
}

}  // namespace depscan
