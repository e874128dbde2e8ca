#include "relu3d/serialize.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace relu3d {

using nlohmann::json;

std::string format_number(double v) {
  // a bare "-0" would read back as the integer 0
  if (v == 0.0 && std::signbit(v)) return "-0.0";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

namespace {

void write_weights(std::ostream& os, const std::vector<WeightEntry>& ws, std::size_t n) {
  bool any_zero = false;
  for (const auto& e : ws) any_zero |= e.weight == 0.0;
  if (!any_zero && 2 * ws.size() >= n) {
    os << '[';
    std::size_t j = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (i) os << ',';
      if (j < ws.size() && ws[j].index == i)
        os << format_number(ws[j++].weight);
      else
        os << '0';
    }
    os << ']';
    return;
  }
  os << "{\"n\":" << n << ",\"entries\":[";
  for (std::size_t j = 0; j < ws.size(); ++j) {
    if (j) os << ',';
    os << '[' << ws[j].index << ',' << format_number(ws[j].weight) << ']';
  }
  os << "]}";
}

void write_readout(std::ostream& os, const Readout& r, std::size_t n) {
  os << "{\"w\":";
  write_weights(os, r.weights, n);
  os << ",\"b\":" << format_number(r.bias) << '}';
}

std::string child(const std::string& path, std::string_view key) {
  return path + "/" + std::string(key);
}
std::string child(const std::string& path, std::size_t i) {
  return path + "/" + std::to_string(i);
}

const json& field(const json& obj, const std::string& path, const char* key) {
  if (!obj.is_object()) throw FormatError(path, "expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) throw FormatError(child(path, key), "missing field");
  return *it;
}

double number(const json& v, const std::string& path) {
  if (!v.is_number()) throw FormatError(path, "expected a number");
  return v.get<double>();
}

std::size_t index(const json& v, const std::string& path) {
  if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<long long>() >= 0))
    throw FormatError(path, "expected a non-negative integer");
  return v.get<std::size_t>();
}

const json& array(const json& v, const std::string& path) {
  if (!v.is_array()) throw FormatError(path, "expected an array");
  return v;
}

std::vector<WeightEntry> read_weights(const json& v, const std::string& path,
                                      std::size_t expected) {
  std::vector<WeightEntry> out;
  if (v.is_array()) {
    if (v.size() != expected)
      throw FormatError(path, "expected " + std::to_string(expected) + " weights, got " +
                                  std::to_string(v.size()));
    for (std::size_t i = 0; i < v.size(); ++i) {
      double w = number(v[i], child(path, i));
      if (w != 0.0) out.push_back({i, w});
    }
    return out;
  }
  if (!v.is_object()) throw FormatError(path, "expected weight array or sparse object");
  const std::size_t n = index(field(v, path, "n"), child(path, "n"));
  if (n != expected)
    throw FormatError(child(path, "n"), "expected size " + std::to_string(expected) +
                                            ", got " + std::to_string(n));
  const std::string ep = child(path, "entries");
  const json& entries = array(field(v, path, "entries"), ep);
  for (std::size_t j = 0; j < entries.size(); ++j) {
    const std::string p = child(ep, j);
    const json& e = array(entries[j], p);
    if (e.size() != 2) throw FormatError(p, "expected [index, value]");
    const std::size_t i = index(e[0], child(p, 0));
    if (i >= n) throw FormatError(child(p, 0), "index out of range");
    if (!out.empty() && i <= out.back().index)
      throw FormatError(child(p, 0), "indices must be strictly increasing");
    out.push_back({i, number(e[1], child(p, 1))});
  }
  return out;
}

Readout read_readout(const json& v, const std::string& path, std::size_t n) {
  Readout r;
  r.weights = read_weights(field(v, path, "w"), child(path, "w"), n);
  r.bias = number(field(v, path, "b"), child(path, "b"));
  return r;
}

}  // namespace

std::string to_document(const Net3D& net) {
  std::ostringstream os;
  os << "{\"schema\":\"" << kNetworkSchema << "\",\"input_dim\":" << net.input_dim()
     << ",\"layers\":[";
  for (std::size_t k = 0; k < net.depth(); ++k) {
    if (k) os << ',';
    os << "\n{\"floors\":[";
    const Layer& layer = net.layers()[k];
    for (std::size_t f = 0; f < layer.floors.size(); ++f) {
      if (f) os << ',';
      os << "{\"neurons\":[";
      const auto& neurons = layer.floors[f].neurons;
      for (std::size_t i = 0; i < neurons.size(); ++i) {
        const Neuron& n = neurons[i];
        if (i) os << ',';
        os << "\n{\"w\":";
        write_weights(os, n.inbound, net.source_size(k));
        os << ",\"b\":" << format_number(n.bias) << ",\"intra\":[";
        for (std::size_t j = 0; j < n.intra.size(); ++j) {
          if (j) os << ',';
          os << "{\"floor\":" << n.intra[j].floor << ",\"index\":" << n.intra[j].index
             << ",\"coeff\":" << format_number(n.intra[j].coeff) << '}';
        }
        os << "]}";
      }
      os << "]}";
    }
    os << "]}";
  }
  os << "],\n\"readout\":";
  const std::size_t n = net.source_size(net.depth());
  if (net.output_dim() == 1) {
    write_readout(os, net.readouts()[0], n);
  } else {
    os << '[';
    for (std::size_t o = 0; o < net.output_dim(); ++o) {
      if (o) os << ',';
      write_readout(os, net.readouts()[o], n);
    }
    os << ']';
  }
  os << "}\n";
  return os.str();
}

Net3D from_document(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw FormatError("", std::string("invalid JSON: ") + e.what());
  }
  const std::string root;
  const json& schema = field(doc, root, "schema");
  if (!schema.is_string() || schema.get<std::string>() != kNetworkSchema)
    throw FormatError("/schema", "unsupported schema");
  const std::size_t input_dim = index(field(doc, root, "input_dim"), "/input_dim");
  if (input_dim == 0) throw FormatError("/input_dim", "must be positive");
  const json& jl = array(field(doc, root, "layers"), "/layers");
  std::vector<Layer> layers;
  std::size_t src = input_dim;
  for (std::size_t k = 0; k < jl.size(); ++k) {
    const std::string lp = child("/layers", k);
    const std::string fp = child(lp, "floors");
    const json& jf = array(field(jl[k], lp, "floors"), fp);
    if (jf.empty()) throw FormatError(fp, "layer has no floors");
    Layer layer;
    for (std::size_t f = 0; f < jf.size(); ++f) {
      const std::string flp = child(fp, f);
      const std::string np = child(flp, "neurons");
      const json& jn = array(field(jf[f], flp, "neurons"), np);
      if (jn.empty()) throw FormatError(np, "floor has no neurons");
      Floor floor;
      for (std::size_t i = 0; i < jn.size(); ++i) {
        const std::string p = child(np, i);
        Neuron n;
        n.inbound = read_weights(field(jn[i], p, "w"), child(p, "w"), src);
        n.bias = number(field(jn[i], p, "b"), child(p, "b"));
        const std::string ip = child(p, "intra");
        if (jn[i].contains("intra")) {
          const json& ji = array(jn[i]["intra"], ip);
          for (std::size_t j = 0; j < ji.size(); ++j) {
            const std::string q = child(ip, j);
            IntraLink l;
            l.floor = index(field(ji[j], q, "floor"), child(q, "floor"));
            l.index = index(field(ji[j], q, "index"), child(q, "index"));
            l.coeff = number(field(ji[j], q, "coeff"), child(q, "coeff"));
            if (!(l.floor < f || (l.floor == f && l.index < i)))
              throw FormatError(q, "intra-link source must precede its target");
            const std::size_t fsize =
                l.floor < f ? layer.floors[l.floor].neurons.size() : jn.size();
            if (l.index >= fsize) throw FormatError(child(q, "index"), "out of range");
            n.intra.push_back(l);
          }
        }
        floor.neurons.push_back(std::move(n));
      }
      layer.floors.push_back(std::move(floor));
    }
    src = layer.size();
    layers.push_back(std::move(layer));
  }
  const json& jr = field(doc, root, "readout");
  std::vector<Readout> outs;
  if (jr.is_array()) {
    if (jr.empty()) throw FormatError("/readout", "no outputs");
    for (std::size_t o = 0; o < jr.size(); ++o)
      outs.push_back(read_readout(jr[o], child("/readout", o), src));
  } else {
    outs.push_back(read_readout(jr, "/readout", src));
  }
  try {
    return Net3D(input_dim, std::move(layers), std::move(outs));
  } catch (const InvalidArgument& e) {
    throw FormatError("", e.what());
  }
}

void save_network(const Net3D& net, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out << to_document(net);
  if (!out) throw std::runtime_error("failed writing " + path.string());
}

Net3D load_network(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return from_document(ss.str());
}

}  // namespace relu3d
