#include "scma/codebook_io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <vector>

#include "scma/errors.hpp"

namespace scma {

std::string format_number(double value) {
  if (value == 0.0) return "0";
  char buffer[64];
  const auto result = std::to_chars(buffer, buffer + sizeof(buffer), value);
  return std::string(buffer, result.ptr);
}

std::string serialize_codebook(const CodebookSet& set) {
  const SystemParams& p = set.params();
  std::ostringstream os;
  os << "scma-codebook\n"
     << "version " << kCodebookFormatVersion << '\n'
     << "K " << p.K << '\n'
     << "J " << p.J << '\n'
     << "M " << p.M << '\n'
     << "N " << p.N << '\n'
     << "sigma2 " << format_number(p.sigma2) << '\n'
     << "varsigma2 " << format_number(p.varsigma2) << '\n'
     << "Pe " << format_number(p.Pe) << '\n'
     << "labeling " << to_string(set.labeling()) << '\n'
     << "graph\n";
  const auto& F = set.graph().matrix();
  for (int k = 0; k < F.rows(); ++k) {
    for (int j = 0; j < F.cols(); ++j) os << (j ? " " : "") << F(k, j);
    os << '\n';
  }
  for (int j = 0; j < p.J; ++j) {
    os << "user " << (j + 1) << '\n';
    const auto& C = set.book(j).C;
    for (int n = 0; n < C.rows(); ++n) {
      for (int m = 0; m < C.cols(); ++m) os << (m ? " " : "") << format_number(C(n, m));
      os << '\n';
    }
  }
  if (!set.unit_gains()) {
    for (int j = 0; j < p.J; ++j) {
      os << "gains " << (j + 1) << '\n';
      const auto& h = set.gains()[j];
      for (int k = 0; k < h.size(); ++k) os << (k ? " " : "") << format_number(h(k));
      os << '\n';
    }
  }
  os << "end\n";
  return os.str();
}

namespace {

class LineReader {
 public:
  explicit LineReader(std::string_view text) {
    std::size_t start = 0;
    int number = 0;
    while (start <= text.size()) {
      const std::size_t stop = text.find('\n', start);
      std::string_view line =
          text.substr(start, stop == std::string_view::npos ? text.size() - start : stop - start);
      ++number;
      if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
      if (!line.empty() && line.front() != '#') {
        std::vector<std::string> tokens;
        std::istringstream is{std::string(line)};
        for (std::string tok; is >> tok;) tokens.push_back(tok);
        if (!tokens.empty()) lines_.push_back({number, std::move(tokens)});
      }
      if (stop == std::string_view::npos) break;
      start = stop + 1;
    }
  }

  const std::vector<std::string>& next(const char* what) {
    if (pos_ >= lines_.size()) throw FormatError(std::string("unexpected end of file, expected ") + what);
    line_ = lines_[pos_].first;
    return lines_[pos_++].second;
  }

  bool done() const { return pos_ >= lines_.size(); }
  int line() const { return line_; }

  [[noreturn]] void fail(const std::string& message) const {
    throw FormatError("line " + std::to_string(line_) + ": " + message);
  }

 private:
  std::vector<std::pair<int, std::vector<std::string>>> lines_;
  std::size_t pos_ = 0;
  int line_ = 0;
};

double parse_double(const LineReader& in, const std::string& token) {
  double value = 0.0;
  const auto* first = token.data();
  const auto* last = token.data() + token.size();
  const auto result = std::from_chars(first, last, value);
  if (result.ec != std::errc() || result.ptr != last) in.fail("invalid number '" + token + "'");
  return value;
}

int parse_int(const LineReader& in, const std::string& token) {
  int value = 0;
  const auto* last = token.data() + token.size();
  const auto result = std::from_chars(token.data(), last, value);
  if (result.ec != std::errc() || result.ptr != last) in.fail("invalid integer '" + token + "'");
  return value;
}

const std::string& keyed(LineReader& in, const char* key) {
  const auto& tokens = in.next(key);
  if (tokens.size() != 2 || tokens[0] != key) in.fail(std::string("expected '") + key + " <value>'");
  return tokens[1];
}

}  // namespace

CodebookSet parse_codebook(std::string_view text) {
  LineReader in(text);
  {
    const auto& magic = in.next("header");
    if (magic.size() != 1 || magic[0] != "scma-codebook") in.fail("missing 'scma-codebook' header");
  }
  const int version = parse_int(in, keyed(in, "version"));
  if (version != kCodebookFormatVersion) in.fail("unsupported format version " + std::to_string(version));

  SystemParams p;
  p.K = parse_int(in, keyed(in, "K"));
  p.J = parse_int(in, keyed(in, "J"));
  p.M = parse_int(in, keyed(in, "M"));
  p.N = parse_int(in, keyed(in, "N"));
  p.sigma2 = parse_double(in, keyed(in, "sigma2"));
  p.varsigma2 = parse_double(in, keyed(in, "varsigma2"));
  p.Pe = parse_double(in, keyed(in, "Pe"));
  const Labeling labeling = labeling_from_string(keyed(in, "labeling"));
  p.validate();

  {
    const auto& tokens = in.next("graph");
    if (tokens.size() != 1 || tokens[0] != "graph") in.fail("expected 'graph'");
  }
  Eigen::MatrixXi F(p.K, p.J);
  for (int k = 0; k < p.K; ++k) {
    const auto& row = in.next("graph row");
    if (static_cast<int>(row.size()) != p.J) in.fail("graph row must have J entries");
    for (int j = 0; j < p.J; ++j) F(k, j) = parse_int(in, row[j]);
  }

  std::vector<Codebook> books(p.J);
  for (int j = 0; j < p.J; ++j) {
    const auto& head = in.next("user block");
    if (head.size() != 2 || head[0] != "user" || parse_int(in, head[1]) != j + 1) {
      in.fail("expected 'user " + std::to_string(j + 1) + "'");
    }
    books[j].C.resize(p.N, p.M);
    books[j].user_index = j;
    for (int n = 0; n < p.N; ++n) {
      const auto& row = in.next("constellation row");
      if (static_cast<int>(row.size()) != p.M) in.fail("constellation row must have M entries");
      for (int m = 0; m < p.M; ++m) books[j].C(n, m) = parse_double(in, row[m]);
    }
  }

  std::vector<Eigen::VectorXd> gains;
  for (;;) {
    const auto& tokens = in.next("'end'");
    if (tokens.size() == 1 && tokens[0] == "end") break;
    if (tokens.size() != 2 || tokens[0] != "gains") in.fail("expected 'gains <user>' or 'end'");
    const int j = parse_int(in, tokens[1]);
    if (j != static_cast<int>(gains.size()) + 1 || j > p.J) in.fail("gains blocks must be in user order");
    const auto& row = in.next("gain row");
    if (static_cast<int>(row.size()) != p.K) in.fail("gain row must have K entries");
    Eigen::VectorXd h(p.K);
    for (int k = 0; k < p.K; ++k) h(k) = parse_double(in, row[k]);
    gains.push_back(std::move(h));
  }
  if (!gains.empty() && static_cast<int>(gains.size()) != p.J) in.fail("gains must be given for every user");
  if (!in.done()) {
    in.next("");
    in.fail("trailing content after 'end'");
  }
  return CodebookSet(p, FactorGraph(std::move(F)), std::move(books), std::move(gains), labeling);
}

CodebookSet read_codebook_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open codebook file " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_codebook(buffer.str());
}

void write_codebook_file(const std::filesystem::path& path, const CodebookSet& set) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot write codebook file " + path.string());
  out << serialize_codebook(set);
  if (!out) throw FormatError("failed writing " + path.string());
}

}  // namespace scma
