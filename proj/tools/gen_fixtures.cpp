// Generates the bundled desk-scale fixtures: a 2,000-review synthetic
// sentiment corpus (label,text CSV) and a dim-50 word-vector store whose
// sentiment words form synonym clusters. Both are deterministic; the checked
// in files under data/ were produced by this tool.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

namespace {

struct WordWithSynonyms {
  const char* word;
  const char* syn1;
  const char* syn2;
};

const WordWithSynonyms kPositive[] = {
    {"brilliant", "luminous", "radiant"},   {"wonderful", "marvelous", "splendid"},
    {"superb", "stellar", "magnificent"},   {"delightful", "pleasing", "enchanting"},
    {"engaging", "captivating", "involving"}, {"witty", "clever", "humorous"},
    {"moving", "touching", "poignant"},     {"stunning", "breathtaking", "dazzling"},
    {"heartfelt", "earnest", "heartwarming"}, {"inventive", "imaginative", "creative"},
    {"gripping", "riveting", "enthralling"}, {"hilarious", "uproarious", "sidesplitting"},
    {"elegant", "graceful", "refined"},     {"refreshing", "invigorating", "novel"},
    {"masterful", "masterly", "expert"},    {"vibrant", "vivid", "energetic"},
    {"tender", "gentle", "affectionate"},   {"absorbing", "immersive", "compelling"},
    {"rewarding", "satisfying", "fulfilling"}, {"sincere", "genuine", "honest"},
};

const WordWithSynonyms kNegative[] = {
    {"dull", "boring", "drab"},             {"tedious", "tiresome", "monotonous"},
    {"awful", "dreadful", "terrible"},      {"clumsy", "awkward", "ungainly"},
    {"bland", "flavorless", "insipid"},     {"dreary", "gloomy", "dismal"},
    {"lifeless", "inert", "flat"},          {"grating", "jarring", "abrasive"},
    {"shallow", "superficial", "vapid"},    {"messy", "untidy", "chaotic"},
    {"sloppy", "careless", "slipshod"},     {"hollow", "empty", "vacant"},
    {"plodding", "sluggish", "laborious"},  {"stale", "musty", "outdated"},
    {"irritating", "annoying", "vexing"},   {"aimless", "directionless", "wandering"},
    {"leaden", "lumbering", "ponderous"},   {"murky", "cloudy", "obscure"},
    {"forgettable", "unmemorable", "disposable"}, {"contrived", "artificial", "forced"},
};

const char* kNouns[] = {
    "movie",    "film",     "story",   "plot",     "director", "cast",     "scene",
    "script",   "acting",   "screenplay", "drama", "comedy",   "thriller", "romance",
    "character", "dialogue", "pacing",  "soundtrack", "ending", "premise",  "sequel",
    "audience", "performance", "camera", "visuals", "editing",  "tone",     "style",
    "theme",    "setting",
};

const char* kOtherWords[] = {
    "feels", "turns", "offers", "delivers", "remains", "though", "times", "throughout",
    "overall", "somewhat", "rather", "often", "occasionally", "ultimately", "mostly",
    "moments", "places", "make",
};

const char* kGlue[] = {"the", "a",  "an", "and", "of",   "with", "but", "is",
                       "it",  "that", "this", "its", "in", "as",  "to",  "at",
                       "while"};

constexpr int kDim = 50;
constexpr int kReviews = 2000;
constexpr int kStoreWords = 2000;

using Rng = std::mt19937;

std::vector<double> random_unit(Rng& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  std::vector<double> v(kDim);
  double sq = 0.0;
  for (double& x : v) {
    x = g(rng);
    sq += x * x;
  }
  double inv = 1.0 / std::sqrt(sq);
  for (double& x : v) x *= inv;
  return v;
}

std::vector<double> jitter(const std::vector<double>& center, Rng& rng, double sigma) {
  std::normal_distribution<double> g(0.0, sigma);
  std::vector<double> v(kDim);
  for (int i = 0; i < kDim; ++i) v[static_cast<std::size_t>(i)] = center[static_cast<std::size_t>(i)] + g(rng);
  return v;
}

// Review templates; slots: M main-class sentiment, O opposite, N noun.
// Template 4 is the deliberately ambiguous one (two of each).
const char* kTemplates[] = {
    "the N is M and M , with a M N that feels O at times .",
    "a M N about a N , M and M throughout but somewhat O overall .",
    "this N offers M acting and a M script , though the N turns O .",
    "the N delivers M and M moments while the N remains O and O .",
    "a M and M N , rather O in places but ultimately M .",
    "the N is O at times , but the M N and M acting make it M overall .",
};

std::string instantiate(const std::string& tmpl, const std::vector<const char*>& main_words,
                        const std::vector<const char*>& opp_words,
                        const std::vector<const char*>& nouns, Rng& rng) {
  std::string out;
  std::size_t mi = 0, oi = 0, ni = 0;
  std::string word;
  for (std::size_t i = 0; i <= tmpl.size(); ++i) {
    char c = i < tmpl.size() ? tmpl[i] : ' ';
    if (c != ' ') {
      word.push_back(c);
      continue;
    }
    if (word.empty()) continue;
    const char* emit = nullptr;
    if (word == "M") {
      emit = main_words[mi++ % main_words.size()];
    } else if (word == "O") {
      emit = opp_words[oi++ % opp_words.size()];
    } else if (word == "N") {
      emit = nouns[ni++ % nouns.size()];
    }
    if (!out.empty()) out.push_back(' ');
    out += emit != nullptr ? emit : word.c_str();
    word.clear();
  }
  (void)rng;
  return out;
}

std::string csv_quote(const std::string& text) {
  std::string out = "\"";
  for (char c : text) {
    if (c == '"') out += "\"\"";
    else out.push_back(c);
  }
  out += "\"";
  return out;
}

char format_buf[64];

std::string fmt(double v) {
  std::snprintf(format_buf, sizeof(format_buf), "%.5f", v);
  return format_buf;
}

}  // namespace

int main(int argc, char** argv) {
  std::string out_dir = argc > 1 ? argv[1] : "data";

  // ---- corpus ----
  {
    Rng rng(20240101);
    std::uniform_int_distribution<int> template_pick(0, 5);
    std::ofstream csv(out_dir + "/mr_2000.csv", std::ios::binary);
    if (!csv) {
      std::cerr << "cannot write " << out_dir << "/mr_2000.csv\n";
      return 1;
    }
    csv << "label,text\n";
    const std::size_t n_pos = sizeof(kPositive) / sizeof(kPositive[0]);
    const std::size_t n_neg = sizeof(kNegative) / sizeof(kNegative[0]);
    const std::size_t n_nouns = sizeof(kNouns) / sizeof(kNouns[0]);
    for (int i = 0; i < kReviews; ++i) {
      int label = i % 2;  // alternate so both classes are exactly balanced
      int t = template_pick(rng);
      std::vector<const char*> main_words, opp_words, nouns;
      std::uniform_int_distribution<std::size_t> pos_pick(0, n_pos - 1);
      std::uniform_int_distribution<std::size_t> neg_pick(0, n_neg - 1);
      std::uniform_int_distribution<std::size_t> noun_pick(0, n_nouns - 1);
      std::set<std::size_t> used;
      auto draw = [&](auto& dist, std::size_t limit) {
        std::size_t k = dist(rng);
        while (used.count(k) > 0 && used.size() < limit) k = dist(rng);
        used.insert(k);
        return k;
      };
      for (int m = 0; m < 4; ++m) {
        main_words.push_back(label == 1 ? kPositive[draw(pos_pick, n_pos)].word
                                        : kNegative[draw(neg_pick, n_neg)].word);
      }
      used.clear();
      for (int o = 0; o < 2; ++o) {
        opp_words.push_back(label == 1 ? kNegative[draw(neg_pick, n_neg)].word
                                       : kPositive[draw(pos_pick, n_pos)].word);
      }
      used.clear();
      for (int n = 0; n < 3; ++n) nouns.push_back(kNouns[draw(noun_pick, n_nouns)]);
      csv << label << ","
          << csv_quote(instantiate(kTemplates[t], main_words, opp_words, nouns, rng)) << "\n";
    }
    std::cout << "wrote " << out_dir << "/mr_2000.csv (" << kReviews << " reviews)\n";
  }

  // ---- embedding store ----
  {
    Rng rng(20240202);
    std::vector<std::pair<std::string, std::vector<double>>> entries;
    std::set<std::string> seen;
    auto add = [&](const std::string& w, std::vector<double> v) {
      if (!seen.insert(w).second) return;
      entries.emplace_back(w, std::move(v));
    };
    auto add_cluster = [&](const WordWithSynonyms& c) {
      std::vector<double> center = random_unit(rng);
      add(c.word, jitter(center, rng, 0.04));
      add(c.syn1, jitter(center, rng, 0.04));
      add(c.syn2, jitter(center, rng, 0.04));
    };
    for (const auto& c : kPositive) add_cluster(c);
    for (const auto& c : kNegative) add_cluster(c);
    for (const char* w : kNouns) add(w, random_unit(rng));
    for (const char* w : kOtherWords) add(w, random_unit(rng));
    for (const char* w : kGlue) add(w, random_unit(rng));

    // pad with pronounceable pseudo-words up to the target size
    const char* syllables[] = {"ba", "ce", "di", "fo", "gu", "ha", "je", "ki", "lo", "mu",
                               "na", "pe", "ri", "so", "tu", "va", "we", "xi", "yo", "zu"};
    std::uniform_int_distribution<int> syl(0, 19);
    while (entries.size() < kStoreWords) {
      std::string w = std::string(syllables[syl(rng)]) + syllables[syl(rng)] + syllables[syl(rng)];
      if (seen.count(w) > 0) continue;
      add(w, random_unit(rng));
    }

    std::ofstream vec(out_dir + "/glove_fixture_50d.txt", std::ios::binary);
    if (!vec) {
      std::cerr << "cannot write " << out_dir << "/glove_fixture_50d.txt\n";
      return 1;
    }
    for (const auto& [word, v] : entries) {
      vec << word;
      for (double x : v) vec << ' ' << fmt(x);
      vec << "\n";
    }
    std::cout << "wrote " << out_dir << "/glove_fixture_50d.txt (" << entries.size()
              << " words, dim " << kDim << ")\n";
  }
  return 0;
}
