#include "fsda/io.hpp"

#include <array>
#include <bit>
#include <charconv>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>

#include "fsda/error.hpp"

namespace fsda::io {

namespace {

void put_u64(std::ostream& out, std::uint64_t v) {
  std::array<char, 8> b{};
  for (int i = 0; i < 8; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xffu);
  out.write(b.data(), 8);
}

std::uint64_t get_u64(std::istream& in) {
  std::array<unsigned char, 8> b{};
  if (!in.read(reinterpret_cast<char*>(b.data()), 8)) throw ParseError("truncated binary file");
  std::uint64_t v = 0;
  for (int i = 7; i >= 0; --i) v = (v << 8) | b[i];
  return v;
}

void put_i64(std::ostream& out, Index v) { put_u64(out, static_cast<std::uint64_t>(v)); }
Index get_i64(std::istream& in) { return static_cast<Index>(get_u64(in)); }
void put_f64(std::ostream& out, double v) { put_u64(out, std::bit_cast<std::uint64_t>(v)); }
double get_f64(std::istream& in) { return std::bit_cast<double>(get_u64(in)); }

void check_magic(std::istream& in, const char (&magic)[8], const char* what) {
  char buf[8];
  if (!in.read(buf, 8) || std::memcmp(buf, magic, 8) != 0)
    throw ParseError(std::string("bad magic bytes for ") + what);
}

Index checked_count(Index v, const char* what) {
  if (v < 0) throw ParseError(std::string("negative ") + what + " in binary header");
  return v;
}

template <class T>
T parse_number(std::string_view tok, std::size_t line_no) {
  T v{};
  const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc() || ptr != tok.data() + tok.size())
    throw ParseError("line " + std::to_string(line_no) + ": cannot parse '" + std::string(tok) +
                     "'");
  return v;
}

// Splits on blanks/tabs; returns number of tokens written.
std::size_t tokenize(std::string_view line, std::array<std::string_view, 4>& toks) {
  std::size_t n = 0;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    if (i >= line.size()) break;
    std::size_t j = i;
    while (j < line.size() && line[j] != ' ' && line[j] != '\t' && line[j] != '\r') ++j;
    if (n < toks.size()) toks[n] = line.substr(i, j - i);
    ++n;
    i = j;
  }
  return n;
}

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
  return in;
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  return out;
}

void finish(std::ostream& out, const std::filesystem::path& path) {
  out.flush();
  if (!out) throw IoError("write to '" + path.string() + "' failed");
}

}  // namespace

std::string hex64(std::uint64_t v) {
  std::ostringstream s;
  s << std::hex << std::setw(16) << std::setfill('0') << v;
  return s.str();
}

void write_sparse_text(std::ostream& out, const SparseMatrix& m, const Provenance& provenance) {
  for (const auto& [k, v] : provenance) out << "% " << k << ' ' << v << '\n';
  out << m.rows() << ' ' << m.cols() << ' ' << m.nnz() << '\n';
  char buf[64];
  for (Index i = 0; i < m.rows(); ++i) {
    const auto r = m.row(i);
    for (std::size_t k = 0; k < r.size(); ++k) {
      const auto res = std::to_chars(buf, buf + sizeof buf, r.values[k]);
      out << i << ' ' << r.cols[k] << ' ' << std::string_view(buf, res.ptr - buf) << '\n';
    }
  }
}

SparseMatrix read_sparse_text(std::istream& in, Provenance* provenance) {
  std::string line;
  std::size_t line_no = 0;
  std::array<std::string_view, 4> toks;
  Index rows = -1, cols = -1, nnz = -1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    if (line[0] == '%') {
      if (provenance) {
        std::istringstream s(line.substr(1));
        std::string key, value;
        s >> key;
        std::getline(s >> std::ws, value);
        if (!key.empty()) (*provenance)[key] = value;
      }
      continue;
    }
    if (tokenize(line, toks) != 3) throw ParseError("line " + std::to_string(line_no) +
                                                    ": expected header 'rows cols nnz'");
    rows = parse_number<Index>(toks[0], line_no);
    cols = parse_number<Index>(toks[1], line_no);
    nnz = parse_number<Index>(toks[2], line_no);
    break;
  }
  if (rows < 0 || cols < 0 || nnz < 0) throw ParseError("missing or invalid sparse header");

  std::vector<Triplet> triplets;
  triplets.reserve(static_cast<std::size_t>(nnz));
  while (static_cast<Index>(triplets.size()) < nnz && std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '%') continue;
    if (tokenize(line, toks) != 3)
      throw ParseError("line " + std::to_string(line_no) + ": expected 'row col value'");
    triplets.push_back({parse_number<Index>(toks[0], line_no), parse_number<Index>(toks[1], line_no),
                        parse_number<double>(toks[2], line_no)});
  }
  if (static_cast<Index>(triplets.size()) != nnz)
    throw ParseError("expected " + std::to_string(nnz) + " entries, found " +
                     std::to_string(triplets.size()));
  return build_sparse(triplets, rows, cols);
}

void write_sparse_binary(std::ostream& out, const SparseMatrix& m) {
  out.write(kSparseMagic, 8);
  put_i64(out, m.rows());
  put_i64(out, m.cols());
  put_i64(out, m.nnz());
  for (Index o : m.row_offsets()) put_i64(out, o);
  for (Index c : m.col_indices()) put_i64(out, c);
  for (double v : m.values()) put_f64(out, v);
}

SparseMatrix read_sparse_binary(std::istream& in) {
  check_magic(in, kSparseMagic, "sparse matrix");
  const Index rows = checked_count(get_i64(in), "rows");
  const Index cols = checked_count(get_i64(in), "cols");
  const Index nnz = checked_count(get_i64(in), "nnz");
  std::vector<Index> offsets(static_cast<std::size_t>(rows) + 1);
  for (auto& o : offsets) o = get_i64(in);
  std::vector<Index> col_indices(static_cast<std::size_t>(nnz));
  for (auto& c : col_indices) c = get_i64(in);
  std::vector<double> values(static_cast<std::size_t>(nnz));
  for (auto& v : values) v = get_f64(in);
  return SparseMatrix(rows, cols, std::move(offsets), std::move(col_indices), std::move(values));
}

void save_sparse(const std::filesystem::path& path, const SparseMatrix& m, bool binary,
                 const Provenance& provenance) {
  auto out = open_out(path);
  if (binary) {
    write_sparse_binary(out, m);
  } else {
    write_sparse_text(out, m, provenance);
  }
  finish(out, path);
}

SparseMatrix load_sparse(const std::filesystem::path& path, Provenance* provenance) {
  auto in = open_in(path);
  char head[8] = {};
  in.read(head, 8);
  const bool binary = in.gcount() == 8 && std::memcmp(head, kSparseMagic, 8) == 0;
  in.clear();
  in.seekg(0);
  if (binary) return read_sparse_binary(in);
  return read_sparse_text(in, provenance);
}

LabelVector read_labels(std::istream& in) {
  std::vector<int> values;
  std::string line;
  std::size_t line_no = 0;
  std::array<std::string_view, 4> toks;
  while (std::getline(in, line)) {
    ++line_no;
    const auto n = tokenize(line, toks);
    if (n == 0 || toks[0].front() == '#') continue;
    if (n != 1) throw ParseError("line " + std::to_string(line_no) + ": expected one label");
    auto tok = toks[0];
    if (tok.front() == '+') tok.remove_prefix(1);
    const int v = parse_number<int>(tok, line_no);
    if (v < -1 || v > 1)
      throw ParseError("line " + std::to_string(line_no) + ": label must be +1, -1 or 0");
    values.push_back(v);
  }
  return LabelVector::from_ints(values);
}

void write_labels(std::ostream& out, const LabelVector& labels) {
  for (std::size_t i = 0; i < labels.size(); ++i) out << static_cast<int>(labels[i]) << '\n';
}

LabelVector load_labels(const std::filesystem::path& path) {
  auto in = open_in(path);
  return read_labels(in);
}

void save_labels(const std::filesystem::path& path, const LabelVector& labels) {
  auto out = open_out(path);
  write_labels(out, labels);
  finish(out, path);
}

void write_ratings_binary(std::ostream& out, const RatingsTable& table) {
  if (table.betas.size() != table.scores.size())
    throw DimensionError("ratings table: one score vector per beta required");
  const std::size_t n = table.scores.empty() ? 0 : table.scores.front().size();
  for (const auto& s : table.scores) check_dimension("ratings row", n, s.size());
  out.write(kRatingsMagic, 8);
  put_i64(out, static_cast<Index>(table.betas.size()));
  put_i64(out, static_cast<Index>(n));
  for (double b : table.betas) put_f64(out, b);
  for (const auto& s : table.scores)
    for (double v : s) put_f64(out, v);
}

RatingsTable read_ratings_binary(std::istream& in) {
  check_magic(in, kRatingsMagic, "ratings");
  const auto n_betas = static_cast<std::size_t>(checked_count(get_i64(in), "n_betas"));
  const auto n = static_cast<std::size_t>(checked_count(get_i64(in), "n_samples"));
  RatingsTable t;
  t.betas.resize(n_betas);
  for (auto& b : t.betas) b = get_f64(in);
  t.scores.assign(n_betas, Vector(n));
  for (auto& s : t.scores)
    for (auto& v : s) v = get_f64(in);
  return t;
}

void write_ratings_text(std::ostream& out, const RatingsTable& table) {
  out << "sample,beta,score\n";
  char buf[64];
  for (std::size_t b = 0; b < table.betas.size(); ++b) {
    for (std::size_t i = 0; i < table.scores[b].size(); ++i) {
      const auto res = std::to_chars(buf, buf + sizeof buf, table.scores[b][i]);
      out << i << ',' << table.betas[b] << ',' << std::string_view(buf, res.ptr - buf) << '\n';
    }
  }
}

}  // namespace fsda::io
