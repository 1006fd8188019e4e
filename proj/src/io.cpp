#include "symdisc/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <span>
#include <system_error>
#include <utility>
#include <vector>

#include "symdisc/errors.hpp"
#include "symdisc/states.hpp"

namespace symdisc {

namespace {

[[noreturn]] void malformed(const std::string& what, int line_no) {
  throw MalformedNetlist("netlist line " + std::to_string(line_no) + ": " + what);
}

std::vector<std::string> split_tokens(std::string_view line) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
    std::size_t j = i;
    while (j < line.size() && line[j] != ' ' && line[j] != '\t') ++j;
    if (j > i) out.emplace_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

/// key=value token; the value keeps any '=' past the first.
std::pair<std::string, std::string> split_kv(const std::string& token, int line_no) {
  auto eq = token.find('=');
  if (eq == std::string::npos || eq == 0 || eq + 1 == token.size())
    malformed("expected key=value, got '" + token + "'", line_no);
  return {token.substr(0, eq), token.substr(eq + 1)};
}

int parse_int(const std::string& text, int line_no) {
  int value = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size())
    malformed("bad integer '" + text + "'", line_no);
  return value;
}

double parse_double(const std::string& text, int line_no) {
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size())
    malformed("bad number '" + text + "'", line_no);
  return value;
}

Stage parse_stage(const std::string& text, int line_no) {
  if (text == "I") return Stage::I;
  if (text == "II") return Stage::II;
  if (text == "III") return Stage::III;
  if (text == "IV") return Stage::IV;
  malformed("unknown stage '" + text + "'", line_no);
}

ElementKind parse_kind(const std::string& text, int line_no) {
  if (text == "HWP") return ElementKind::Hwp;
  if (text == "PBS") return ElementKind::Pbs;
  if (text == "PS") return ElementKind::Ps;
  if (text == "BS") return ElementKind::Bs;
  if (text == "MIRROR") return ElementKind::Mirror;
  if (text == "DETECTOR") return ElementKind::Detector;
  malformed("unknown element '" + text + "'", line_no);
}

Pol parse_pol(const std::string& text, int line_no) {
  if (text == "V") return Pol::V;
  if (text == "H") return Pol::H;
  malformed("polarization must be V or H, got '" + text + "'", line_no);
}

/// Ordered key=value fields with presence tracking; rejects repeats and
/// leftovers so every emitted field is consumed exactly once.
class FieldMap {
 public:
  FieldMap(std::span<const std::string> tokens, int line_no) : line_no_(line_no) {
    for (const auto& t : tokens) {
      auto [k, v] = split_kv(t, line_no);
      for (const auto& [key, unused] : fields_)
        if (key == k) malformed("repeated field '" + k + "'", line_no);
      fields_.emplace_back(k, v);
    }
  }

  std::string take(const std::string& key) {
    for (std::size_t i = 0; i < fields_.size(); ++i) {
      if (fields_[i].first == key) {
        std::string v = fields_[i].second;
        fields_.erase(fields_.begin() + static_cast<std::ptrdiff_t>(i));
        return v;
      }
    }
    malformed("missing field '" + key + "'", line_no_);
  }

  void expect_empty() const {
    if (!fields_.empty())
      malformed("unexpected field '" + fields_.front().first + "'", line_no_);
  }

 private:
  std::vector<std::pair<std::string, std::string>> fields_;
  int line_no_;
};

std::vector<int> parse_int_list(const std::string& text, int line_no) {
  std::vector<int> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    auto comma = text.find(',', start);
    auto end = comma == std::string::npos ? text.size() : comma;
    out.push_back(parse_int(text.substr(start, end - start), line_no));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

void append_element_fields(std::string& out, const OpticalElement& e) {
  switch (e.kind) {
    case ElementKind::Hwp:
      out += " angle=" + format_double(e.param);
      out += " path=" + std::to_string(e.path_a);
      break;
    case ElementKind::Pbs:
    case ElementKind::Bs:
    case ElementKind::Mirror:
      out += " a=" + std::to_string(e.path_a);
      out += " b=" + std::to_string(e.path_b);
      break;
    case ElementKind::Ps:
      out += " phase=" + format_double(e.param);
      out += " path=" + std::to_string(e.path_a);
      out += std::string(" pol=") + (e.pol == Pol::V ? "V" : "H");
      break;
    case ElementKind::Detector:
      out += " path=" + std::to_string(e.path_a);
      out += " label=" + e.label;
      break;
  }
}

OpticalElement element_from_fields(Stage stage, ElementKind kind, FieldMap& fields,
                                   int line_no) {
  OpticalElement e;
  switch (kind) {
    case ElementKind::Hwp:
      e = OpticalElement::hwp(stage, parse_int(fields.take("path"), line_no),
                              parse_double(fields.take("angle"), line_no));
      break;
    case ElementKind::Pbs:
      e = OpticalElement::pbs(stage, parse_int(fields.take("a"), line_no),
                              parse_int(fields.take("b"), line_no));
      break;
    case ElementKind::Bs:
      e = OpticalElement::bs(stage, parse_int(fields.take("a"), line_no),
                             parse_int(fields.take("b"), line_no));
      break;
    case ElementKind::Mirror:
      e = OpticalElement::mirror(stage, parse_int(fields.take("a"), line_no),
                                 parse_int(fields.take("b"), line_no));
      break;
    case ElementKind::Ps: {
      double phase = parse_double(fields.take("phase"), line_no);
      int path = parse_int(fields.take("path"), line_no);
      Pol pol = parse_pol(fields.take("pol"), line_no);
      e = OpticalElement::ps(stage, path, pol, phase);
      break;
    }
    case ElementKind::Detector: {
      int path = parse_int(fields.take("path"), line_no);
      std::string label = fields.take("label");
      e = OpticalElement::detector(stage, path, std::move(label));
      break;
    }
  }
  fields.expect_empty();
  return e;
}

}  // namespace

std::string format_double(double value) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  if (ec != std::errc{}) throw std::runtime_error("number formatting failed");
  return std::string(buf, ptr);
}

std::string netlist_to_text(const OpticalNetlist& netlist) {
  std::string out = "netlist dim=" + std::to_string(netlist.dim.n);
  out += " state=" + std::to_string(netlist.prepared_index);
  out += " perm=";
  for (std::size_t i = 0; i < netlist.logical_to_path.size(); ++i) {
    if (i > 0) out += ',';
    out += std::to_string(netlist.logical_to_path[i]);
  }
  out += '\n';
  for (const OpticalElement& e : netlist.elements) {
    out += to_string(e.stage) + ' ' + to_string(e.kind);
    append_element_fields(out, e);
    out += '\n';
  }
  return out;
}

OpticalNetlist netlist_from_text(std::string_view text) {
  OpticalNetlist netlist;
  bool have_header = false;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto nl = text.find('\n', pos);
    auto end = nl == std::string_view::npos ? text.size() : nl;
    std::string_view line = text.substr(pos, end - pos);
    ++line_no;
    pos = end + 1;
    if (nl == std::string_view::npos && line.empty()) break;

    auto tokens = split_tokens(line);
    if (tokens.empty() || tokens.front().front() == '#') continue;
    if (!have_header) {
      if (tokens.front() != "netlist")
        malformed("expected 'netlist' header, got '" + tokens.front() + "'", line_no);
      FieldMap fields{std::span(tokens).subspan(1), line_no};
      int dim = parse_int(fields.take("dim"), line_no);
      int state = parse_int(fields.take("state"), line_no);
      auto perm = parse_int_list(fields.take("perm"), line_no);
      fields.expect_empty();
      if (dim < 2) malformed("dim must be at least 2", line_no);
      netlist.dim = Dimension::of(dim);
      netlist.prepared_index = state;
      netlist.logical_to_path = std::move(perm);
      have_header = true;
      continue;
    }
    if (tokens.size() < 2) malformed("expected '<stage> <kind> ...'", line_no);
    Stage stage = parse_stage(tokens[0], line_no);
    ElementKind kind = parse_kind(tokens[1], line_no);
    FieldMap fields{std::span(tokens).subspan(2), line_no};
    netlist.elements.push_back(element_from_fields(stage, kind, fields, line_no));
  }
  if (!have_header) throw MalformedNetlist("empty netlist text");
  validate_netlist(netlist);
  return netlist;
}

ordered_json netlist_to_json(const OpticalNetlist& netlist) {
  ordered_json j;
  j["schema_version"] = 1;
  j["dim"] = netlist.dim.n;
  j["state"] = netlist.prepared_index;
  j["perm"] = netlist.logical_to_path;
  ordered_json elements = ordered_json::array();
  for (const OpticalElement& e : netlist.elements) {
    ordered_json je;
    je["stage"] = to_string(e.stage);
    je["kind"] = to_string(e.kind);
    switch (e.kind) {
      case ElementKind::Hwp:
        je["angle"] = e.param;
        je["path"] = e.path_a;
        break;
      case ElementKind::Pbs:
      case ElementKind::Bs:
      case ElementKind::Mirror:
        je["a"] = e.path_a;
        je["b"] = e.path_b;
        break;
      case ElementKind::Ps:
        je["phase"] = e.param;
        je["path"] = e.path_a;
        je["pol"] = e.pol == Pol::V ? "V" : "H";
        break;
      case ElementKind::Detector:
        je["path"] = e.path_a;
        je["label"] = e.label;
        break;
    }
    elements.push_back(std::move(je));
  }
  j["elements"] = std::move(elements);
  return j;
}

OpticalNetlist netlist_from_json(const ordered_json& j) {
  try {
    if (j.value("schema_version", 0) != 1)
      throw MalformedNetlist("unsupported netlist schema version");
    OpticalNetlist netlist;
    netlist.dim = Dimension::of(j.at("dim").get<int>());
    netlist.prepared_index = j.at("state").get<int>();
    netlist.logical_to_path = j.at("perm").get<std::vector<int>>();
    for (const auto& je : j.at("elements")) {
      Stage stage = parse_stage(je.at("stage").get<std::string>(), 0);
      ElementKind kind = parse_kind(je.at("kind").get<std::string>(), 0);
      OpticalElement e;
      switch (kind) {
        case ElementKind::Hwp:
          e = OpticalElement::hwp(stage, je.at("path").get<int>(),
                                  je.at("angle").get<double>());
          break;
        case ElementKind::Pbs:
          e = OpticalElement::pbs(stage, je.at("a").get<int>(), je.at("b").get<int>());
          break;
        case ElementKind::Bs:
          e = OpticalElement::bs(stage, je.at("a").get<int>(), je.at("b").get<int>());
          break;
        case ElementKind::Mirror:
          e = OpticalElement::mirror(stage, je.at("a").get<int>(),
                                     je.at("b").get<int>());
          break;
        case ElementKind::Ps:
          e = OpticalElement::ps(stage, je.at("path").get<int>(),
                                 parse_pol(je.at("pol").get<std::string>(), 0),
                                 je.at("phase").get<double>());
          break;
        case ElementKind::Detector:
          e = OpticalElement::detector(stage, je.at("path").get<int>(),
                                       je.at("label").get<std::string>());
          break;
      }
      netlist.elements.push_back(std::move(e));
    }
    validate_netlist(netlist);
    return netlist;
  } catch (const ordered_json::exception& ex) {
    throw MalformedNetlist(std::string("netlist json: ") + ex.what());
  }
}

ordered_json report_to_json(const SimReport& report, const SimConfig& config,
                            const AngleVector& angles) {
  ordered_json j;
  j["schema_version"] = 1;
  j["dim"] = report.dim;
  j["angles"] = angles.thetas;
  j["coefficients"] = coefficients_from_angles(angles).c;
  j["analytic_p_d"] = report.analytic_p_d;

  ordered_json jc;
  jc["trials"] = report.trials;
  jc["seed"] = config.seed;
  if (config.source.empty())
    jc["source"] = "uniform";
  else
    jc["source"] = config.source;
  if (std::isinf(config.pbs_extinction))
    jc["pbs_extinction"] = "inf";
  else
    jc["pbs_extinction"] = config.pbs_extinction;
  jc["phase_noise_sigma"] = config.phase_noise_sigma;
  jc["detector_efficiency"] = config.detector_efficiency;
  jc["heralding_efficiency"] = config.heralding_efficiency;
  j["config"] = std::move(jc);

  ordered_json jr;
  jr["prepared_counts"] = report.prepared_counts;
  jr["confusion"] = report.confusion;
  jr["inconclusive_by_prepared"] = report.inconclusive_by_prepared;
  jr["discarded_by_prepared"] = report.discarded_by_prepared;
  jr["conclusive_count"] = report.conclusive_count;
  jr["inconclusive_count"] = report.inconclusive_count;
  jr["discarded_count"] = report.discarded_count;
  jr["conclusive_rate"] = report.conclusive_rate;
  jr["wilson_95"] = {report.wilson_low, report.wilson_high};
  jr["correct_rate"] = report.correct_rate;
  j["results"] = std::move(jr);
  return j;
}

std::string report_to_csv(const SimReport& report) {
  std::string out = "prepared";
  for (int k = 0; k < report.dim; ++k)
    out += ",detected_" + std::to_string(k);
  out += ",inconclusive,discarded\n";
  for (int l = 0; l < report.dim; ++l) {
    out += std::to_string(l);
    for (int k = 0; k < report.dim; ++k)
      out += ',' + std::to_string(report.confusion[l][k]);
    out += ',' + std::to_string(report.inconclusive_by_prepared[l]);
    out += ',' + std::to_string(report.discarded_by_prepared[l]);
    out += '\n';
  }
  return out;
}

void write_file_atomic(const std::filesystem::path& path, std::string_view content) {
  if (path.has_parent_path()) {
    std::error_code dir_ec;
    std::filesystem::create_directories(path.parent_path(), dir_ec);
  }
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) throw std::runtime_error("write failed for " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp);
    throw std::runtime_error("cannot replace " + path.string() + ": " + ec.message());
  }
}

}  // namespace symdisc
