#include <algorithm>
#include <string>

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "mrlcqa/evaluate.hpp"
#include "mrlcqa/interpreter.hpp"
#include "mrlcqa/model.hpp"
#include "mrlcqa/retriever.hpp"
#include "mrlcqa/seed.hpp"
#include "mrlcqa/trainer.hpp"
#include "mrlcqa/workbench.hpp"

namespace py = pybind11;
using namespace mrlcqa;

namespace {

py::object to_py(const nlohmann::json& j) { return py::module_::import("json").attr("loads")(j.dump()); }

nlohmann::json from_py(const py::object& o) {
  return nlohmann::json::parse(py::module_::import("json").attr("dumps")(o).cast<std::string>());
}

std::span<const Sample> split_of(const Dataset& d, const std::string& name) {
  if (name == "train") return d.train;
  if (name == "valid") return d.validation;
  if (name == "test") return d.test;
  throw py::value_error("unknown split '" + name + "'");
}

const Sample& find_sample(const Dataset& d, const std::string& split, const std::string& id) {
  auto qs = split_of(d, split);
  auto it = std::find_if(qs.begin(), qs.end(), [&](const Sample& s) { return s.id == id; });
  if (it == qs.end()) throw py::key_error(id);
  return *it;
}

std::span<const Sample> slice(const Dataset& d, int offset, int count) {
  if (offset < 0 || count < 0 || static_cast<std::size_t>(offset) + count > d.train.size())
    throw py::value_error("slice exceeds the training split");
  return std::span<const Sample>(d.train).subspan(offset, count);
}

py::dict inference_dict(const Inference& r, const Dataset& d) {
  py::dict out;
  out["program"] = r.program ? py::cast(to_string(*r.program)) : py::none();
  out["valid"] = r.valid;
  out["answer"] = to_py(answer_to_json(r.answer, d.kb));
  py::list support;
  for (const auto& m : r.support) support.append(py::make_tuple(d.train[m.index].id, m.score));
  out["support"] = support;
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Knowledge-base question answering with a meta-learned neural program induction policy";

  py::register_exception<Error>(m, "Error", PyExc_RuntimeError);

  py::class_<GeneratorConfig>(m, "GeneratorConfig")
      .def(py::init<>())
      .def_readwrite("entities_per_type", &GeneratorConfig::entities_per_type)
      .def_readwrite("train", &GeneratorConfig::train)
      .def_readwrite("validation", &GeneratorConfig::validation)
      .def_readwrite("test", &GeneratorConfig::test)
      .def_readwrite("proportions", &GeneratorConfig::proportions)
      .def_readwrite("max_retries", &GeneratorConfig::max_retries)
      .def_readwrite("seed", &GeneratorConfig::seed);

  py::enum_<OuterUpdate>(m, "OuterUpdate")
      .value("REPTILE", OuterUpdate::Reptile)
      .value("FOMAML", OuterUpdate::FirstOrderMaml);

  py::class_<TrainingConfig>(m, "TrainingConfig")
      .def(py::init<>())
      .def_readwrite("inner_lr", &TrainingConfig::inner_lr)
      .def_readwrite("outer_lr", &TrainingConfig::outer_lr)
      .def_readwrite("samples", &TrainingConfig::samples)
      .def_readwrite("meta_samples", &TrainingConfig::meta_samples)
      .def_readwrite("support_size", &TrainingConfig::support_size)
      .def_readwrite("threshold", &TrainingConfig::threshold)
      .def_readwrite("max_decode_len", &TrainingConfig::max_decode_len)
      .def_readwrite("batch_tasks", &TrainingConfig::batch_tasks)
      .def_readwrite("pretrain_epochs", &TrainingConfig::pretrain_epochs)
      .def_readwrite("pretrain_batch", &TrainingConfig::pretrain_batch)
      .def_property(
          "pretrain_lr", [](const TrainingConfig& c) { return c.pretrain_adam.lr; },
          [](TrainingConfig& c, double v) { c.pretrain_adam.lr = v; })
      .def_readwrite("pg_epochs", &TrainingConfig::pg_epochs)
      .def_property(
          "pg_lr", [](const TrainingConfig& c) { return c.pg_adam.lr; },
          [](TrainingConfig& c, double v) { c.pg_adam.lr = v; })
      .def_readwrite("baseline", &TrainingConfig::baseline)
      .def_readwrite("baseline_decay", &TrainingConfig::baseline_decay)
      .def_readwrite("meta_epochs", &TrainingConfig::meta_epochs)
      .def_readwrite("outer", &TrainingConfig::outer)
      .def_readwrite("seed", &TrainingConfig::seed);

  py::class_<ExperimentConfig>(m, "ExperimentConfig")
      .def(py::init<>())
      .def_readwrite("generator", &ExperimentConfig::generator)
      .def_readwrite("training", &ExperimentConfig::training)
      .def_readwrite("embed", &ExperimentConfig::embed)
      .def_readwrite("hidden", &ExperimentConfig::hidden)
      .def_readwrite("bfs_max_len", &ExperimentConfig::bfs_max_len)
      .def_readwrite("pretrain_questions", &ExperimentConfig::pretrain_questions)
      .def_readwrite("pg_questions", &ExperimentConfig::pg_questions)
      .def_readwrite("meta_questions", &ExperimentConfig::meta_questions)
      .def_readwrite("seed", &ExperimentConfig::seed)
      .def("seeded", [](const ExperimentConfig& c, std::uint64_t s) { return seeded(c, s); });

  py::class_<Dataset>(m, "Dataset")
      .def_static("generate", &generate_dataset, py::arg("config") = GeneratorConfig{})
      .def_static("load", &load_dataset, py::arg("directory"))
      .def("save", [](const Dataset& d, const std::string& dir) { save_dataset(dir, d); }, py::arg("directory"))
      .def_property_readonly("triple_count", [](const Dataset& d) { return d.kb.triples().size(); })
      .def_property_readonly("entity_count", [](const Dataset& d) { return d.kb.entity_count(); })
      .def("size", [](const Dataset& d, const std::string& split) { return split_of(d, split).size(); },
           py::arg("split"))
      .def(
          "samples",
          [](const Dataset& d, const std::string& split) {
            py::list out;
            for (const auto& s : split_of(d, split)) out.append(to_py(sample_to_json(s, d.kb)));
            return out;
          },
          py::arg("split"))
      .def(
          "sample", [](const Dataset& d, const std::string& split, const std::string& id) {
            return to_py(sample_to_json(find_sample(d, split, id), d.kb));
          },
          py::arg("split"), py::arg("id"));

  py::class_<Model>(m, "Model")
      .def_static(
          "create",
          [](const Dataset& d, int embed, int hidden, std::uint64_t seed) {
            return make_model(build_input_vocab(d.train), embed, hidden, derive_seed(seed, "init"));
          },
          py::arg("dataset"), py::arg("embed") = 50, py::arg("hidden") = 128, py::arg("seed") = 1)
      .def_static("load", &load_checkpoint, py::arg("path"))
      .def("save", [](const Model& model, const std::string& path) { save_checkpoint(path, model); }, py::arg("path"))
      .def_property_readonly("parameter_count", [](const Model& model) { return model.theta.size(); })
      .def_property_readonly("vocabulary_size", [](const Model& model) { return model.input.size(); })
      .def_property_readonly("parameters", [](const Model& model) { return Eigen::VectorXd(model.theta.values()); })
      .def("__eq__", [](const Model& a, const Model& b) { return a == b; });

  m.def(
      "annotate",
      [](const Dataset& d, const std::string& split, int max_len, int limit) {
        auto items = annotate(split_of(d, split), d.kb, max_len, limit);
        py::list out;
        for (const auto& a : items) out.append(to_py(annotated_to_json(a, d.kb)));
        return out;
      },
      py::arg("dataset"), py::arg("split") = "train", py::arg("max_len") = 3, py::arg("limit") = -1,
      "Breadth-first search for the shortest program scoring reward 1 on each sample.");

  m.def(
      "pretrain",
      [](Model model, const Dataset& d, const py::list& annotated, const TrainingConfig& cfg) {
        std::vector<AnnotatedSample> items;
        for (const auto& a : annotated) items.push_back(annotated_from_json(from_py(py::reinterpret_borrow<py::object>(a)), d.kb));
        py::gil_scoped_release release;
        Environment env(d.kb, model);
        model.theta = pretrain_teacher_forcing(model.theta, items, env, cfg);
        return model;
      },
      py::arg("model"), py::arg("dataset"), py::arg("annotated"), py::arg("config") = TrainingConfig{});

  m.def(
      "pg_train",
      [](Model model, const Dataset& d, int offset, int count, const TrainingConfig& cfg) {
        py::gil_scoped_release release;
        Environment env(d.kb, model);
        model.theta = pg_train(model.theta, slice(d, offset, count), env, cfg);
        return model;
      },
      py::arg("model"), py::arg("dataset"), py::arg("offset"), py::arg("count"), py::arg("config") = TrainingConfig{});

  m.def(
      "meta_train",
      [](Model model, const Dataset& d, int offset, int count, const TrainingConfig& cfg) {
        py::gil_scoped_release release;
        Environment env(d.kb, model);
        model.theta = meta_train(model.theta, slice(d, offset, count), d.train, env, cfg);
        return model;
      },
      py::arg("model"), py::arg("dataset"), py::arg("offset"), py::arg("count"), py::arg("config") = TrainingConfig{});

  m.def(
      "evaluate",
      [](const Model& model, const Dataset& d, const std::string& split, bool adapted, const TrainingConfig& cfg) {
        EvalReport r;
        {
          py::gil_scoped_release release;
          Environment env(d.kb, model);
          r = evaluate(model.theta, split_of(d, split), d.train, env, cfg, adapted);
        }
        return to_py(report_to_json(r, d.kb));
      },
      py::arg("model"), py::arg("dataset"), py::arg("split") = "test", py::arg("adapted") = false,
      py::arg("config") = TrainingConfig{});

  m.def(
      "infer",
      [](const Model& model, const Dataset& d, const std::string& id, const std::string& split, bool adapted,
         const TrainingConfig& cfg) {
        const Sample& q = find_sample(d, split, id);
        Environment env(d.kb, model);
        if (!adapted) return inference_dict(infer_frozen(model.theta, q, env, cfg), d);
        Retriever retriever(d.train, table_embedder(model.input, model.theta));
        return inference_dict(infer(model.theta, q, retriever, env, cfg), d);
      },
      py::arg("model"), py::arg("dataset"), py::arg("id"), py::arg("split") = "test", py::arg("adapted") = false,
      py::arg("config") = TrainingConfig{});

  m.def(
      "retrieve",
      [](const Model& model, const Dataset& d, const std::string& id, const std::string& split, std::size_t n,
         double threshold) {
        Retriever retriever(d.train, table_embedder(model.input, model.theta));
        std::vector<std::pair<std::string, double>> out;
        for (const auto& s : retriever.retrieve(find_sample(d, split, id), n, threshold))
          out.emplace_back(d.train[s.index].id, s.score);
        return out;
      },
      py::arg("model"), py::arg("dataset"), py::arg("id"), py::arg("split") = "test", py::arg("n") = 5,
      py::arg("threshold") = 0.85, "Most relevant training questions, as (id, score) pairs.");

  m.def(
      "execute",
      [](const std::string& program, const Dataset& d, const py::object& artifacts) {
        ArtifactTable table;
        if (!artifacts.is_none()) {
          auto j = from_py(artifacts);
          table.entities = j.value("entities", std::vector<std::string>{});
          table.relations = j.value("relations", std::vector<std::string>{});
          table.types = j.value("types", std::vector<std::string>{});
          table.numbers = j.value("numbers", std::vector<std::int64_t>{});
        }
        return to_py(answer_to_json(execute(parse_program(program), d.kb, table), d.kb));
      },
      py::arg("program"), py::arg("dataset"), py::arg("artifacts") = py::none());

  m.def(
      "reward",
      [](const py::object& predicted, const py::object& gold, const Dataset& d) {
        return reward(answer_from_json(from_py(predicted), d.kb), answer_from_json(from_py(gold), d.kb));
      },
      py::arg("predicted"), py::arg("gold"), py::arg("dataset"));

  m.def(
      "run_ablation",
      [](const ExperimentConfig& cfg) {
        AblationResult r;
        {
          py::gil_scoped_release release;
          r = run_ablation(cfg);
        }
        py::dict out;
        out["pg_frozen_macro_f1"] = r.pg_frozen.macro_f1;
        out["adapted_macro_f1"] = r.adapted.macro_f1;
        out["gain"] = r.gain();
        out["annotated"] = r.annotated;
        out["seconds"] = r.seconds;
        return out;
      },
      py::arg("config"));
}
