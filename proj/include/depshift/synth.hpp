// Deterministic synthetic two-period corpora with planted change.
//
// Every sentence is "det amod TARGET verb" (head-final):
//   1 det DET -> 3 det, 2 adj ADJ -> 3 amod, 3 target NOUN -> 4 nsubj, 4 verb VERB root
// so each target occurrence yields the slots chi_det, chi_amod and pa_nsubj.
// Stable targets draw adjectives and verbs from one pool in both periods.
// Changed targets keep round(overlap * vocab) pool entries in period 2 and
// replace the rest with new fillers, so lower overlap means larger change.
#pragma once

#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace depshift {

struct SynthSpec {
  int n_stable_targets = 10;
  int n_changed_targets = 10;
  int sentences_per_target_per_period = 100;
  int filler_vocab_size = 10;
  double overlap = 0.2;
  std::uint64_t seed = 7;
  // Extra sentences per target whose det, amod and verb fillers occur
  // exactly once in the whole corpus pair; split across both periods.
  int singletons_per_slot = 0;
};

struct SynthCorpus {
  std::string period1;  // CoNLL-U
  std::string period2;
  std::string targets;  // semeval-format target list
  std::map<std::string, double> gold_graded;
  std::map<std::string, int> gold_binary;
};

namespace detail {

inline void append_sentence(std::string& out, const std::string& sent_id, const std::string& det,
                            const std::string& adj, const std::string& target,
                            const std::string& verb) {
  out += "# sent_id = " + sent_id + "\n";
  out += "1\t" + det + "\t" + det + "\tDET\t_\t_\t3\tdet\t_\t_\n";
  out += "2\t" + adj + "\t" + adj + "\tADJ\t_\t_\t3\tamod\t_\t_\n";
  out += "3\t" + target + "\t" + target + "\tNOUN\t_\t_\t4\tnsubj\t_\t_\n";
  out += "4\t" + verb + "\t" + verb + "\tVERB\t_\t_\t0\troot\t_\t_\n\n";
}

inline std::string fixed6(double v) {
  std::ostringstream os;
  os.setf(std::ios::fixed);
  os.precision(6);
  os << v;
  return os.str();
}

}  // namespace detail

inline SynthCorpus generate(const SynthSpec& spec) {
  if (spec.n_stable_targets < 0 || spec.n_changed_targets < 0 ||
      spec.n_stable_targets + spec.n_changed_targets < 1) {
    throw std::invalid_argument("synth: need at least one target");
  }
  if (spec.sentences_per_target_per_period < 1 || spec.filler_vocab_size < 1) {
    throw std::invalid_argument("synth: sentence count and vocabulary size must be >= 1");
  }
  if (!(spec.overlap >= 0.0 && spec.overlap <= 1.0)) {
    throw std::invalid_argument("synth: overlap must lie in [0, 1]");
  }
  if (spec.singletons_per_slot < 0) throw std::invalid_argument("synth: negative singleton count");

  struct Target {
    std::string lemma;
    bool changed;
  };
  std::vector<Target> targets;
  for (int i = 0; i < spec.n_stable_targets; ++i) targets.push_back({"stable" + std::to_string(i), false});
  for (int i = 0; i < spec.n_changed_targets; ++i) targets.push_back({"changed" + std::to_string(i), true});

  const int vocab = spec.filler_vocab_size;
  const int shared = static_cast<int>(std::lround(spec.overlap * vocab));
  static const std::vector<std::string> dets = {"the", "a"};

  SynthCorpus out;
  std::mt19937_64 rng(spec.seed);
  // Raw modulo keeps the stream portable across standard libraries.
  auto draw = [&rng](int n) { return static_cast<int>(rng() % static_cast<std::uint64_t>(n)); };

  for (int period = 1; period <= 2; ++period) {
    std::string& text = period == 1 ? out.period1 : out.period2;
    int sent = 0;
    for (const auto& t : targets) {
      const bool swap = t.changed && period == 2;
      for (int s = 0; s < spec.sentences_per_target_per_period; ++s) {
        const std::string& det = dets[static_cast<std::size_t>(draw(2))];
        const int a = draw(vocab);
        const int v = draw(vocab);
        const std::string adj = (swap && a >= shared) ? "new" + t.lemma + "adj" + std::to_string(a)
                                                      : "adj" + std::to_string(a);
        const std::string verb = (swap && v >= shared) ? "new" + t.lemma + "verb" + std::to_string(v)
                                                       : "verb" + std::to_string(v);
        detail::append_sentence(text, "p" + std::to_string(period) + "-" + std::to_string(++sent),
                                det, adj, t.lemma, verb);
      }
    }
    for (const auto& t : targets) {
      for (int k = 0; k < spec.singletons_per_slot; ++k) {
        if ((k % 2 == 0) != (period == 1)) continue;
        const std::string tag = t.lemma + "x" + std::to_string(k);
        detail::append_sentence(text, "p" + std::to_string(period) + "-" + std::to_string(++sent),
                                "noisedet" + tag, "noiseadj" + tag, t.lemma, "noiseverb" + tag);
      }
    }
  }

  for (const auto& t : targets) {
    const std::string id = t.lemma + "_nn";
    out.targets += id + "\n";
    out.gold_graded[id] = t.changed ? 1.0 - spec.overlap : 0.0;
    out.gold_binary[id] = (t.changed && shared < vocab) ? 1 : 0;
  }
  return out;
}

inline std::string graded_tsv(const SynthCorpus& c) {
  std::string out;
  for (const auto& [k, v] : c.gold_graded) out += k + "\t" + detail::fixed6(v) + "\n";
  return out;
}

inline std::string binary_tsv(const SynthCorpus& c) {
  std::string out;
  for (const auto& [k, v] : c.gold_binary) out += k + "\t" + std::to_string(v) + "\n";
  return out;
}

/// Writes period1.conllu, period2.conllu, targets.txt, gold_graded.tsv and
/// gold_binary.tsv into `dir` (which must exist).
inline void write_synth(const SynthCorpus& c, const std::string& dir) {
  auto put = [&](const std::string& name, const std::string& body) {
    std::ofstream f(dir + "/" + name, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write '" + dir + "/" + name + "'");
    f << body;
  };
  put("period1.conllu", c.period1);
  put("period2.conllu", c.period2);
  put("targets.txt", c.targets);
  put("gold_graded.tsv", graded_tsv(c));
  put("gold_binary.tsv", binary_tsv(c));
}

}  // namespace depshift
