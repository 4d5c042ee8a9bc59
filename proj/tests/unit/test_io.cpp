#include <doctest.h>

#include <sstream>

#include "fsda/error.hpp"
#include "fsda/io.hpp"
#include "oracle.hpp"

using namespace fsda;

TEST_CASE("sparse text round trip is exact") {
  std::mt19937_64 rng(7);
  const auto x = oracle::random_sparse(50, 40, 0.1, rng);
  std::stringstream ss;
  io::write_sparse_text(ss, x, {{"source", "unit"}});
  io::Provenance p;
  const auto y = io::read_sparse_text(ss, &p);
  CHECK(y == x);
  CHECK(p.at("source") == "unit");
  // matches naive dense construction
  CHECK(oracle::dense(y) == oracle::dense(x));
}

TEST_CASE("sparse binary round trip is exact") {
  std::mt19937_64 rng(8);
  const auto x = oracle::random_sparse(50, 40, 0.1, rng);
  std::stringstream ss;
  io::write_sparse_binary(ss, x);
  CHECK(ss.str().substr(0, 8) == "FSDASPM1");
  CHECK(io::read_sparse_binary(ss) == x);
}

TEST_CASE("file helpers sniff the format") {
  std::mt19937_64 rng(9);
  const auto x = oracle::random_sparse(12, 9, 0.3, rng);
  const auto dir = std::filesystem::temp_directory_path();
  const auto bin = dir / "fsda_io_test.bin", txt = dir / "fsda_io_test.txt";
  io::save_sparse(bin, x, true);
  io::save_sparse(txt, x, false);
  CHECK(io::load_sparse(bin) == x);
  CHECK(io::load_sparse(txt) == x);
  std::filesystem::remove(bin);
  std::filesystem::remove(txt);
  CHECK_THROWS_AS(io::load_sparse(dir / "fsda_missing_file"), IoError);
}

TEST_CASE("malformed sparse text") {
  auto parse = [](const std::string& s) {
    std::istringstream in(s);
    return io::read_sparse_text(in);
  };
  CHECK_THROWS_AS(parse("2 2\n"), ParseError);
  CHECK_THROWS_AS(parse("2 2 2\n0 0 1\n"), ParseError);
  CHECK_THROWS_AS(parse("2 2 1\n0 x 1\n"), ParseError);
  CHECK_THROWS_AS(parse("2 2 1\n5 0 1\n"), StructuralError);
  CHECK_THROWS_AS(parse("2 2 2\n0 0 1\n0 0 1\n"), StructuralError);
  CHECK(parse("% c\n2 2 1\n1 0 3.5\n").nnz() == 1);
}

TEST_CASE("truncated binary is a parse error") {
  std::mt19937_64 rng(1);
  std::stringstream ss;
  io::write_sparse_binary(ss, oracle::random_sparse(5, 5, 0.5, rng));
  std::string s = ss.str();
  std::istringstream in(s.substr(0, s.size() - 4));
  CHECK_THROWS_AS(io::read_sparse_binary(in), ParseError);
}

TEST_CASE("labels") {
  std::istringstream in("+1\n-1\n# comment\n0\n\n1\n");
  const auto l = io::read_labels(in);
  CHECK(l.size() == 4);
  CHECK(l.n_class1() == 2);
  std::stringstream out;
  io::write_labels(out, l);
  CHECK(io::read_labels(out) == l);
  std::istringstream bad("1\n2\n");
  CHECK_THROWS_AS(io::read_labels(bad), ParseError);
}

TEST_CASE("ratings container") {
  io::RatingsTable t{{1e-3, 0.1}, {{0.5, -1.25, 3.0}, {1.0 / 3.0, 2.0, -7.0}}};
  std::stringstream ss;
  io::write_ratings_binary(ss, t);
  CHECK(io::read_ratings_binary(ss) == t);
  std::stringstream csv;
  io::write_ratings_text(csv, t);
  std::string header;
  std::getline(csv, header);
  CHECK(header == "sample,beta,score");
  int lines = 0;
  for (std::string line; std::getline(csv, line);) ++lines;
  CHECK(lines == 6);
}
