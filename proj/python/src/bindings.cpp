#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "yarbus/acts.hpp"
#include "yarbus/belief.hpp"
#include "yarbus/errors.hpp"
#include "yarbus/extract.hpp"
#include "yarbus/ontology.hpp"
#include "yarbus/preprocess.hpp"
#include "yarbus/runner.hpp"

namespace py = pybind11;
using namespace yarbus;

namespace {

DialogAct make_act(const std::string& label,
                   const std::vector<std::pair<std::string, std::string>>& args) {
  std::vector<SlotValue> svs;
  svs.reserve(args.size());
  for (const auto& [s, v] : args) svs.push_back({s, v});
  return DialogAct(label, std::move(svs));
}

std::string act_repr(const DialogAct& a) {
  std::ostringstream os;
  os << a.label << "(";
  for (std::size_t i = 0; i < a.args.size(); ++i)
    os << (i ? "," : "") << a.args[i].slot << "=" << a.args[i].value;
  os << ")";
  return os.str();
}

py::dict info_to_dict(const Info& info, const Ontology& onto) {
  py::dict d;
  for (std::size_t s = 0; s < info.slots.size(); ++s) {
    const SlotInfo& si = info.slots[s];
    if (si.kind == SlotInfo::Kind::positive) {
      d[py::str(onto.slot_name(s))] = onto.value_name(s, si.value);
    } else if (si.kind == SlotInfo::Kind::negated) {
      py::list negs;
      for (std::uint32_t v : si.negated) negs.append(onto.value_name(s, v));
      d[py::str(onto.slot_name(s))] = negs;
    }
  }
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "joint-goal belief tracking over slot-filling dialog acts";

  py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);
  py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);
  py::register_exception<IoError>(m, "IoError", PyExc_OSError);

  auto load_ontology_file = [](const std::string& path) { return Ontology::load_file(path); };

  py::class_<Ontology>(m, "Ontology")
      .def_static("load", load_ontology_file, py::arg("path"))
      .def_static("from_json",
                  [](const std::string& text) {
                    std::istringstream in(text);
                    return Ontology::load(in);
                  },
                  py::arg("text"))
      .def_property_readonly("slots", &Ontology::slots)
      .def("values",
           [](const Ontology& o, const std::string& slot) {
             auto s = o.slot_index(slot);
             if (!s) throw ValidationError("unknown slot '" + slot + "'");
             return o.values(*s);
           },
           py::arg("slot"))
      .def("to_json", &Ontology::to_json_string)
      .def("__eq__", [](const Ontology& a, const Ontology& b) { return a == b; });

  m.def("load_ontology", load_ontology_file, py::arg("path"));
  m.def("joint_goal_count", &joint_goal_count, py::arg("ontology"));

  py::class_<DialogAct>(m, "DialogAct")
      .def(py::init(&make_act), py::arg("label"),
           py::arg("args") = std::vector<std::pair<std::string, std::string>>{})
      .def_readonly("label", &DialogAct::label)
      .def_property_readonly("args",
                             [](const DialogAct& a) {
                               std::vector<std::pair<std::string, std::string>> out;
                               for (const auto& sv : a.args) out.emplace_back(sv.slot, sv.value);
                               return out;
                             })
      .def("__repr__", &act_repr)
      .def("__eq__", [](const DialogAct& a, const DialogAct& b) { return a == b; })
      .def("__hash__", [](const DialogAct& a) { return py::hash(py::str(act_repr(a))); });

  py::class_<Utterance>(m, "Utterance")
      .def(py::init<std::vector<DialogAct>>(), py::arg("acts") = std::vector<DialogAct>{})
      .def_readonly("acts", &Utterance::acts)
      .def("__len__", [](const Utterance& u) { return u.acts.size(); })
      .def("__repr__",
           [](const Utterance& u) {
             std::ostringstream os;
             os << "{";
             for (std::size_t i = 0; i < u.acts.size(); ++i)
               os << (i ? "," : "") << act_repr(u.acts[i]);
             os << "}";
             return os.str();
           })
      .def("__eq__", [](const Utterance& a, const Utterance& b) { return a == b; });

  py::class_<SluHypotheses>(m, "SluHypotheses")
      .def_property_readonly("entries",
                             [](const SluHypotheses& h) { return h.entries; })
      .def("__len__", [](const SluHypotheses& h) { return h.entries.size(); });

  m.def("normalize_hyps", &normalize_hyps, py::arg("raw"));

  py::class_<RuleMask>(m, "RuleMask")
      .def(py::init([](const std::string& s) { return RuleMask::parse(s); }),
           py::arg("mask") = "11111")
      .def("__str__", &RuleMask::str)
      .def("__repr__", [](const RuleMask& m_) { return "RuleMask(" + m_.str() + ")"; });

  m.def("resolve_repeat", &resolve_repeat, py::arg("machine_turns"));
  m.def("unthis_hyps",
        [](const SluHypotheses& h, const Utterance& machine, const Ontology& onto) {
          return unthis_hyps(h, machine, onto);
        },
        py::arg("hyps"), py::arg("machine"), py::arg("ontology"));

  m.def("extract_infos",
        [](const Utterance& machine, const Utterance& user, const Ontology& onto,
           const RuleMask& mask) {
          py::list out;
          for (const Info& info : extract_infos(machine, user, onto, mask))
            out.append(info_to_dict(info, onto));
          return out;
        },
        py::arg("machine"), py::arg("user"), py::arg("ontology"),
        py::arg("mask") = RuleMask::all(),
        "Extracted information tuples, one dict per Info: positive values as "
        "strings, negated sets as lists, unknown slots omitted.");

  py::class_<Belief>(m, "Belief")
      .def("__len__", [](const Belief& b) { return b.size(); })
      .def("mass", &Belief::mass)
      .def("ranked",
           [](const Belief& b, const Ontology& onto) {
             py::list out;
             for (const auto& [goal, p] : ranked(b))
               out.append(py::make_tuple(goal_to_slots(goal, onto), p));
             return out;
           },
           py::arg("ontology"),
           "Entries as (slots dict, probability), ranked descending; unknown "
           "slots omitted.");

  m.def("initial_belief", &initial_belief, py::arg("ontology"));
  m.def("update",
        [](const Belief& b, const Utterance& machine, const SluHypotheses& hyps,
           const Ontology& onto, const RuleMask& mask) {
          return update(b, machine, hyps, onto, mask);
        },
        py::arg("belief"), py::arg("machine"), py::arg("hyps"), py::arg("ontology"),
        py::arg("mask") = RuleMask::all());
  m.def("prune", &prune, py::arg("belief"), py::arg("theta"));

  m.def("track_session_files",
        [](const std::string& log_path, const std::string& label_path,
           const std::string& ontology_path, const std::string& mask, double theta) {
          const Ontology onto = Ontology::load_file(ontology_path);
          const DialogSession session = load_session_file(log_path, label_path, onto);
          py::list turns;
          for (const OutputTurn& turn :
               yarbus_track_session(session, onto, RuleMask::parse(mask), theta)) {
            py::list hyps;
            for (const JointHyp& h : turn.hyps) hyps.append(py::make_tuple(h.slots, h.score));
            turns.append(hyps);
          }
          return turns;
        },
        py::arg("log_path"), py::arg("label_path") = "", py::arg("ontology_path"),
        py::arg("mask") = "11111", py::arg("theta") = 1e-2,
        "Tracks one DSTC-format session; per turn, the ranked (slots, score) "
        "hypotheses.");
}
