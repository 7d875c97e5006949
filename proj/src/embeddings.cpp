#include "assoc/embeddings.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstring>
#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

namespace assoc {

namespace {

std::string lowercase(const std::string& s) {
  std::string out = s;
  for (char& c : out)
    c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

}  // namespace

EmbeddingTable::EmbeddingTable(std::string view, int dim)
    : view_(std::move(view)), dim_(dim) {}

EmbeddingTable EmbeddingTable::hashed(std::string view, int dim, uint64_t seed) {
  EmbeddingTable t(std::move(view), dim);
  t.hashed_ = true;
  t.seed_ = seed;
  return t;
}

bool EmbeddingTable::contains(const std::string& item) const {
  return vectors_.count(item) > 0;
}

std::vector<double> EmbeddingTable::lookup(const std::string& item) const {
  if (hashed_) {
    uint64_t h = seed_ ^ fnv1a64(view_ + "\x1f" + item);
    std::mt19937_64 rng(h);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::vector<double> v(dim_);
    double norm = 0.0;
    for (double& x : v) {
      x = normal(rng);
      norm += x * x;
    }
    norm = std::sqrt(norm);
    if (norm > 0)
      for (double& x : v) x /= norm;
    return v;
  }
  auto it = vectors_.find(item);
  if (it != vectors_.end()) return it->second;
  it = vectors_.find(kOovItem);
  if (it != vectors_.end()) return it->second;
  return std::vector<double>(dim_, 0.0);
}

void EmbeddingTable::set(const std::string& item, std::vector<double> vec) {
  if (static_cast<int>(vec.size()) != dim_)
    throw std::runtime_error("embedding dimension mismatch for " + item);
  vectors_[item] = std::move(vec);
}

std::vector<std::string> comment_char_items(const std::string& text) {
  std::vector<std::string> out;
  for (char c : lowercase(text))
    if (!std::isspace(static_cast<unsigned char>(c)))
      out.push_back(std::string(1, c));
  return out;
}

std::vector<std::string> comment_word_items(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(lowercase(text));
  std::string w;
  while (in >> w) out.push_back(w);
  return out;
}

std::vector<std::string> code_char_items(
    const std::vector<std::string>& tokens) {
  std::vector<std::string> out;
  for (const auto& t : tokens)
    for (char c : lowercase(t)) out.push_back(std::string(1, c));
  return out;
}

std::vector<std::string> code_subtoken_items(
    const std::vector<std::string>& tokens) {
  std::vector<std::string> out;
  for (const auto& t : tokens)
    for (const auto& st : subtokenize(t)) out.push_back(st);
  return out;
}

namespace {

// Plain skip-gram with negative sampling over one view's sequences.
EmbeddingTable train_view(const std::string& view,
                          const std::vector<std::vector<std::string>>& docs,
                          const EmbedConfig& cfg) {
  // vocabulary: frequency >= min_count, rest folded into OOV
  std::unordered_map<std::string, long long> freq;
  for (const auto& d : docs)
    for (const auto& item : d) ++freq[item];
  std::vector<std::pair<std::string, long long>> vocab;
  long long oov_count = 0;
  for (const auto& [item, c] : freq) {
    if (c >= cfg.min_count) vocab.emplace_back(item, c);
    else oov_count += c;
  }
  std::sort(vocab.begin(), vocab.end(), [](const auto& a, const auto& b) {
    return a.second != b.second ? a.second > b.second : a.first < b.first;
  });
  vocab.emplace_back(kOovItem, std::max(1ll, oov_count));
  std::unordered_map<std::string, int> index;
  for (size_t i = 0; i < vocab.size(); ++i)
    index[vocab[i].first] = static_cast<int>(i);
  const int V = static_cast<int>(vocab.size());
  const int D = cfg.dim;

  std::mt19937_64 rng(cfg.seed ^ fnv1a64(view));
  std::uniform_real_distribution<double> unif(-0.5, 0.5);
  std::vector<double> in(static_cast<size_t>(V) * D);
  std::vector<double> out(static_cast<size_t>(V) * D, 0.0);
  for (double& x : in) x = unif(rng) / D;

  // unigram^0.75 negative sampling table
  std::vector<double> cum(V);
  double total = 0.0;
  for (int i = 0; i < V; ++i) {
    total += std::pow(static_cast<double>(vocab[i].second), 0.75);
    cum[i] = total;
  }
  std::uniform_real_distribution<double> upick(0.0, total);
  auto sample_negative = [&]() {
    double r = upick(rng);
    return static_cast<int>(
        std::lower_bound(cum.begin(), cum.end(), r) - cum.begin());
  };

  // index sequences with OOV folding
  std::vector<std::vector<int>> seqs;
  for (const auto& d : docs) {
    std::vector<int> s;
    s.reserve(d.size());
    for (const auto& item : d) {
      auto it = index.find(item);
      s.push_back(it != index.end() ? it->second : V - 1);
    }
    if (!s.empty()) seqs.push_back(std::move(s));
  }

  long long total_tokens = 0;
  for (const auto& s : seqs) total_tokens += static_cast<long long>(s.size());
  long long steps_total = std::max(1ll, total_tokens * cfg.epochs);
  long long step = 0;
  std::uniform_int_distribution<int> wpick(1, cfg.window);
  std::vector<double> grad(D);

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    for (const auto& s : seqs) {
      const int L = static_cast<int>(s.size());
      for (int c = 0; c < L; ++c, ++step) {
        double lr = cfg.learning_rate *
                    std::max(0.0001, 1.0 - static_cast<double>(step) / steps_total);
        int b = wpick(rng);
        int center = s[c];
        double* vi = &in[static_cast<size_t>(center) * D];
        for (int o = std::max(0, c - b); o <= std::min(L - 1, c + b); ++o) {
          if (o == c) continue;
          int context = s[o];
          std::fill(grad.begin(), grad.end(), 0.0);
          for (int k = 0; k <= cfg.negatives; ++k) {
            int target = k == 0 ? context : sample_negative();
            double gold = k == 0 ? 1.0 : 0.0;
            if (k > 0 && target == context) continue;
            double* vo = &out[static_cast<size_t>(target) * D];
            double dot = 0.0;
            for (int d = 0; d < D; ++d) dot += vi[d] * vo[d];
            double pred = 1.0 / (1.0 + std::exp(-dot));
            double g = (gold - pred) * lr;
            for (int d = 0; d < D; ++d) {
              grad[d] += g * vo[d];
              vo[d] += g * vi[d];
            }
          }
          for (int d = 0; d < D; ++d) vi[d] += grad[d];
        }
      }
    }
  }

  EmbeddingTable table(view, D);
  for (int i = 0; i < V; ++i) {
    std::vector<double> v(in.begin() + static_cast<size_t>(i) * D,
                          in.begin() + static_cast<size_t>(i + 1) * D);
    table.set(vocab[i].first, std::move(v));
  }
  return table;
}

}  // namespace

EmbeddingTables train_embeddings(const std::vector<EmbedDocument>& corpus,
                                 const EmbedConfig& cfg) {
  if (corpus.empty()) throw std::runtime_error("embedding corpus is empty");
  std::vector<std::vector<std::string>> cchar, cword, kchar, ksub, ktok;
  for (const auto& doc : corpus) {
    cchar.push_back(comment_char_items(doc.return_text));
    cword.push_back(comment_word_items(doc.return_text));
    kchar.push_back(code_char_items(doc.code_tokens));
    ksub.push_back(code_subtoken_items(doc.code_tokens));
    ktok.push_back(doc.code_tokens);
  }
  EmbeddingTables t;
  t.dim = cfg.dim;
  t.comment_char = train_view("comment_char", cchar, cfg);
  t.comment_word = train_view("comment_word", cword, cfg);
  t.code_char = train_view("code_char", kchar, cfg);
  t.code_subtoken = train_view("code_subtoken", ksub, cfg);
  t.code_token = train_view("code_token", ktok, cfg);
  return t;
}

EmbeddingTables hashed_fallback(int dim, uint64_t seed) {
  if (dim <= 0) throw std::runtime_error("embedding dim must be positive");
  EmbeddingTables t;
  t.dim = dim;
  t.comment_char = EmbeddingTable::hashed("comment_char", dim, seed);
  t.comment_word = EmbeddingTable::hashed("comment_word", dim, seed);
  t.code_char = EmbeddingTable::hashed("code_char", dim, seed);
  t.code_subtoken = EmbeddingTable::hashed("code_subtoken", dim, seed);
  t.code_token = EmbeddingTable::hashed("code_token", dim, seed);
  return t;
}

std::vector<double> embed_mean(const std::vector<std::string>& items,
                               const EmbeddingTable& table) {
  std::vector<double> mean(table.dim(), 0.0);
  if (items.empty()) return mean;
  for (const auto& item : items) {
    auto v = table.lookup(item);
    for (int d = 0; d < table.dim(); ++d) mean[d] += v[d];
  }
  for (double& x : mean) x /= static_cast<double>(items.size());
  return mean;
}

double cosine(const std::vector<double>& a, const std::vector<double>& b) {
  double dot = 0.0, na = 0.0, nb = 0.0;
  const size_t n = std::min(a.size(), b.size());
  for (size_t i = 0; i < n; ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  if (na <= 0.0 || nb <= 0.0) return 0.0;
  return dot / (std::sqrt(na) * std::sqrt(nb));
}

namespace {

void write_u32(std::ostream& out, uint32_t v) {
  unsigned char b[4] = {static_cast<unsigned char>(v & 0xff),
                        static_cast<unsigned char>((v >> 8) & 0xff),
                        static_cast<unsigned char>((v >> 16) & 0xff),
                        static_cast<unsigned char>((v >> 24) & 0xff)};
  out.write(reinterpret_cast<char*>(b), 4);
}

uint32_t read_u32(std::istream& in) {
  unsigned char b[4];
  in.read(reinterpret_cast<char*>(b), 4);
  if (!in) throw std::runtime_error("truncated embedding file");
  return static_cast<uint32_t>(b[0]) | (static_cast<uint32_t>(b[1]) << 8) |
         (static_cast<uint32_t>(b[2]) << 16) |
         (static_cast<uint32_t>(b[3]) << 24);
}

void write_string(std::ostream& out, const std::string& s) {
  write_u32(out, static_cast<uint32_t>(s.size()));
  out.write(s.data(), static_cast<std::streamsize>(s.size()));
}

std::string read_string(std::istream& in) {
  uint32_t len = read_u32(in);
  std::string s(len, '\0');
  in.read(s.data(), len);
  if (!in) throw std::runtime_error("truncated embedding file");
  return s;
}

void write_table(std::ostream& out, const EmbeddingTable& t) {
  write_string(out, t.view());
  write_u32(out, static_cast<uint32_t>(t.dim()));
  write_u32(out, static_cast<uint32_t>(t.vocab_size()));
  for (const auto& [item, vec] : t.vectors()) {
    write_string(out, item);
    for (double x : vec) {
      float f = static_cast<float>(x);
      uint32_t bits;
      std::memcpy(&bits, &f, 4);
      write_u32(out, bits);
    }
  }
}

EmbeddingTable read_table(std::istream& in) {
  std::string view = read_string(in);
  int dim = static_cast<int>(read_u32(in));
  uint32_t vocab = read_u32(in);
  EmbeddingTable t(view, dim);
  for (uint32_t i = 0; i < vocab; ++i) {
    std::string item = read_string(in);
    std::vector<double> vec(dim);
    for (int d = 0; d < dim; ++d) {
      uint32_t bits = read_u32(in);
      float f;
      std::memcpy(&f, &bits, 4);
      vec[d] = f;
    }
    t.set(item, std::move(vec));
  }
  return t;
}

constexpr char kMagic[4] = {'E', 'M', 'B', 'T'};

}  // namespace

void save_embeddings(const EmbeddingTables& tables, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write embeddings file: " + path);
  out.write(kMagic, 4);
  write_u32(out, static_cast<uint32_t>(tables.dim));
  write_table(out, tables.comment_char);
  write_table(out, tables.comment_word);
  write_table(out, tables.code_char);
  write_table(out, tables.code_subtoken);
  write_table(out, tables.code_token);
}

EmbeddingTables load_embeddings(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open embeddings file: " + path);
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, kMagic, 4) != 0)
    throw std::runtime_error("not an embeddings file: " + path);
  EmbeddingTables t;
  t.dim = static_cast<int>(read_u32(in));
  t.comment_char = read_table(in);
  t.comment_word = read_table(in);
  t.code_char = read_table(in);
  t.code_subtoken = read_table(in);
  t.code_token = read_table(in);
  return t;
}

}  // namespace assoc
