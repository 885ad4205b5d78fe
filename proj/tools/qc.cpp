// Batch front end: parse operator, matrix, and curve files, dispatch to the
// pipelines, and emit deterministic JSON artifacts.
//
// Exit codes: 0 success (and zero residual for verify commands), 1 parse
// error, 2 precondition violation, 3 nonzero verification residual.

#include "qcurve/json_io.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>

using namespace qcurve;

namespace {

struct Opts {
  int prec = 32;    // series window (1/z orders)
  int orders = 16;  // dressing and operator depth
  int xcap = 16;    // x-degree cap
  int depth = 16;   // basis depth for companion and flow commands
  int hcap = 3;     // hbar truncation for deformations
  std::string hbar = "0";
  std::string lambda;  // discrete multiplier; empty defers to --hbar
  int branch = 0;
  std::string backend = "exact";
  std::string out;
};

Json read_input(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw parse_error("cannot open input file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_json_text(ss.str());
}

void emit(const Opts& o, const Json& j) {
  std::string text = dump_json(j);
  if (o.out.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream outf(o.out, std::ios::binary);
  if (!outf) throw parse_error("cannot open output file: " + o.out);
  outf << text;
}

int backend_bits(const Opts& o) {
  if (o.backend == "approx") return default_prec_bits;
  return 0;
}

QuantizeOptions quantize_opts(const Opts& o) {
  QuantizeOptions qo;
  qo.window = o.prec;
  qo.xcap = o.xcap;
  qo.bits = backend_bits(o);
  return qo;
}

DiscreteOptions discrete_opts(const Opts& o) {
  DiscreteOptions dop;
  dop.window = o.prec;
  dop.bits = backend_bits(o);
  return dop;
}

// The discrete multiplier: --lambda wins, otherwise --hbar "series" means
// lambda = e^hbar at the hbar cap and a rational --hbar is exponentiated
// only when zero (lambda = 1).
HSeries multiplier(const Opts& o) {
  if (!o.lambda.empty()) return HSeries(Scalar::parse(o.lambda));
  if (o.hbar == "series") return HSeries::exp_hbar(o.hcap);
  Scalar h = Scalar::parse(o.hbar);
  if (!h.is_zero())
    throw precondition_error(
        "a nonzero rational --hbar has no exact multiplier; pass --lambda or --hbar series");
  return HSeries(Scalar(1L));
}

Json undress_result_to_json(const UndressResult& ud) {
  Json j;
  j["s"] = psdeltaop_to_json(ud.s);
  j["invertible"] = ud.invertible;
  j["l_inverse"] = psdeltaop_to_json(ud.l_inverse);
  return j;
}

Connection connection_input(const Json& j, const Opts& o) {
  if (j.contains("b")) return connection_from_json(j);
  WMatrix m = wmatrix_from_json(j);
  if (o.hbar == "series" || o.hbar == "symbolic")
    return connection_from_companion(m, hbar_symbol());
  return connection_from_companion(m, HSeries(Scalar::parse(o.hbar)));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"exact formal operator calculus for quantum curves"};
  app.require_subcommand(1);
  app.fallthrough();

  Opts o;
  if (const char* env = std::getenv("QC_DEFAULT_PREC")) {
    try {
      o.prec = std::max(1, std::stoi(env));
    } catch (...) {
    }
  }
  app.add_option("--prec", o.prec, "series window (tracked 1/z orders)");
  app.add_option("--orders", o.orders, "dressing and operator depth");
  app.add_option("--xcap", o.xcap, "x-degree cap");
  app.add_option("--depth", o.depth, "basis depth for companion and flow commands");
  app.add_option("--hcap", o.hcap, "hbar truncation order");
  app.add_option("--hbar", o.hbar, "hbar as a rational string, or \"series\"/\"symbolic\"");
  app.add_option("--lambda", o.lambda, "discrete multiplier as a scalar string");
  app.add_option("--branch", o.branch, "branch index");
  app.add_option("--backend", o.backend, "exact or approx")
      ->check(CLI::IsMember({"exact", "approx"}));
  app.add_option("--out", o.out, "output path (default stdout)");

  std::function<int()> job;
  std::string in1, in2, scalar_arg;
  int int_arg = 1;

  auto add_cmd = [&](const char* name, const char* desc) {
    CLI::App* c = app.add_subcommand(name, desc);
    c->add_option("input", in1, "input file")->required();
    return c;
  };
  auto add_cmd2 = [&](const char* name, const char* desc) {
    CLI::App* c = add_cmd(name, desc);
    c->add_option("input2", in2, "second input file")->required();
    return c;
  };

  add_cmd2("mul", "product of two differential operators")->callback([&] {
    job = [&] {
      PsDiffOp a = psdiffop_from_json(read_input(in1), o.xcap);
      PsDiffOp b = psdiffop_from_json(read_input(in2), o.xcap);
      emit(o, psdiffop_to_json(a * b));
      return 0;
    };
  });
  add_cmd2("commutator", "commutator of two differential operators")->callback([&] {
    job = [&] {
      PsDiffOp a = psdiffop_from_json(read_input(in1), o.xcap);
      PsDiffOp b = psdiffop_from_json(read_input(in2), o.xcap);
      emit(o, psdiffop_to_json(commutator(a, b)));
      return 0;
    };
  });
  add_cmd("split", "differential part and complementary tail")->callback([&] {
    job = [&] {
      PsDiffOp a = psdiffop_from_json(read_input(in1), o.xcap);
      Json j;
      j["plus"] = psdiffop_to_json(a.plus_part());
      j["minus"] = psdiffop_to_json(a.minus_part());
      emit(o, j);
      return 0;
    };
  });
  add_cmd2("dress", "conjugate the second operator by the first")->callback([&] {
    job = [&] {
      PsDiffOp s = psdiffop_from_json(read_input(in1), o.xcap);
      PsDiffOp a = psdiffop_from_json(read_input(in2), o.xcap);
      emit(o, psdiffop_to_json(dress(s, a, o.orders)));
      return 0;
    };
  });
  add_cmd("undress", "dressing operator of a normalized monic operator")->callback([&] {
    job = [&] {
      PsDiffOp q = psdiffop_from_json(read_input(in1), o.xcap);
      emit(o, psdiffop_to_json(undress(q, o.orders)));
      return 0;
    };
  });
  add_cmd("root", "fractional power Q^{n/q} through the dressing")
      ->add_option("--n", int_arg, "numerator of the exponent")
      ->capture_default_str();
  app.get_subcommand("root")->callback([&] {
    job = [&] {
      PsDiffOp q = psdiffop_from_json(read_input(in1), o.xcap);
      emit(o, psdiffop_to_json(psdo_root(q, int_arg, o.orders)));
      return 0;
    };
  });
  add_cmd("sato", "dressing <-> Grassmannian point, direction by input type")->callback([&] {
    job = [&] {
      Json j = read_input(in1);
      if (j.contains("basis"))
        emit(o, psdiffop_to_json(sato_operator(grpoint_from_json(j), o.orders, o.xcap)));
      else
        emit(o, grpoint_to_json(sato_point(psdiffop_from_json(j, o.xcap), o.depth, o.prec)));
      return 0;
    };
  });
  add_cmd("companion", "companion matrix of a verified pair")->callback([&] {
    job = [&] {
      QuantumPair pair = qpair_from_json(read_input(in1), o.xcap);
      emit(o, wmatrix_to_json(companion_matrix(pair, o.depth)));
      return 0;
    };
  });
  add_cmd("quantize", "quantize one branch of a companion matrix")->callback([&] {
    job = [&] {
      WMatrix m = wmatrix_from_json(read_input(in1));
      QuantumPair pair = quantize(m, Scalar::parse(o.hbar), o.branch, quantize_opts(o));
      emit(o, qpair_to_json(pair));
      return 0;
    };
  });
  add_cmd("quantize-matrix", "quantize every branch of a companion matrix")->callback([&] {
    job = [&] {
      WMatrix m = wmatrix_from_json(read_input(in1));
      Json branches = Json::array();
      for (int k = 0; k < m.q; ++k) {
        Json entry;
        entry["branch"] = k;
        try {
          entry["pair"] = qpair_to_json(quantize(m, Scalar::parse(o.hbar), k, quantize_opts(o)));
        } catch (const std::exception& e) {
          entry["error"] = e.what();
        }
        branches.push_back(std::move(entry));
      }
      Json j;
      j["branches"] = std::move(branches);
      emit(o, j);
      return 0;
    };
  });
  {
    CLI::App* c = add_cmd("kp-step", "first-order KP flow on a pair");
    c->add_option("--n", int_arg, "flow index")->capture_default_str();
    c->add_option("--t", scalar_arg, "nilpotent time as a scalar string")->required();
    c->callback([&] {
      job = [&] {
        QuantumPair pair = qpair_from_json(read_input(in1), o.xcap);
        emit(o, qpair_to_json(kp_flow_step(pair, int_arg, Scalar::parse(scalar_arg), o.depth)));
        return 0;
      };
    });
  }
  add_cmd("verify", "[P,Q] - hbar; exit 0 iff zero within window")->callback([&] {
    job = [&] {
      QuantumPair pair = qpair_from_json(read_input(in1), o.xcap);
      PsDiffOp res = verify_pair(pair.p_op, pair.q_op, pair.hbar);
      emit(o, psdiffop_to_json(res));
      return res.is_zero() ? 0 : 3;
    };
  });
  add_cmd2("delta-mul", "product of two difference operators")->callback([&] {
    job = [&] {
      PsDeltaOp a = psdeltaop_from_json(read_input(in1));
      PsDeltaOp b = psdeltaop_from_json(read_input(in2));
      emit(o, psdeltaop_to_json(a * b));
      return 0;
    };
  });
  add_cmd("flag", "flag generated by a difference dressing operator")->callback([&] {
    job = [&] {
      PsDeltaOp s = psdeltaop_from_json(read_input(in1));
      emit(o, flag_to_json(flag_from_dressing(s, o.depth)));
      return 0;
    };
  });
  add_cmd("undress-diff", "difference dressing of a monic operator")->callback([&] {
    job = [&] {
      PsDeltaOp l = psdeltaop_from_json(read_input(in1));
      emit(o, undress_result_to_json(undress_difference(l, o.orders, 3 * o.orders)));
      return 0;
    };
  });
  add_cmd("discrete-companion", "companion matrix of a discrete pair")->callback([&] {
    job = [&] {
      DiscretePair pair = dpair_from_json(read_input(in1));
      emit(o, wmatrix_to_json(discrete_companion(pair, o.orders, 3 * o.orders)));
      return 0;
    };
  });
  add_cmd("discrete-quantize", "quantize a companion matrix at a multiplier")->callback([&] {
    job = [&] {
      WMatrix m = wmatrix_from_json(read_input(in1));
      HSeries lambda = multiplier(o);
      auto assigns = discrete_branches(m, lambda, backend_bits(o));
      if (assigns.empty())
        throw precondition_error("lambda^n != 1: the multiplier admits no branch");
      if (o.branch < 0 || o.branch >= static_cast<int>(assigns.size()))
        throw precondition_error("branch index out of range");
      emit(o, dpair_to_json(discrete_quantize(m, lambda, assigns[o.branch], discrete_opts(o))));
      return 0;
    };
  });
  add_cmd("hbar-deform", "deform a commuting pair to K L = e^hbar L K")->callback([&] {
    job = [&] {
      DiscretePair pair = dpair_from_json(read_input(in1));
      emit(o, dpair_to_json(hbar_deform(pair, o.hcap, discrete_opts(o))));
      return 0;
    };
  });
  {
    CLI::App* c = add_cmd("dkp-step", "first-order discrete KP flow");
    c->add_option("--n", int_arg, "flow index")->capture_default_str();
    c->add_option("--t", scalar_arg, "nilpotent time as a scalar string")->required();
    c->callback([&] {
      job = [&] {
        PsDeltaOp l = psdeltaop_from_json(read_input(in1));
        emit(o, psdeltaop_to_json(
                    dkp_flow_step(l, int_arg, Scalar::parse(scalar_arg), o.orders, 3 * o.orders)));
        return 0;
      };
    });
  }
  add_cmd("verify-discrete", "KL - lambda LK; exit 0 iff zero within window")->callback([&] {
    job = [&] {
      DiscretePair pair = dpair_from_json(read_input(in1));
      PsDeltaOp res = verify_discrete(pair.k_op, pair.l_op, pair.lambda);
      emit(o, psdeltaop_to_json(res));
      return res.is_zero() ? 0 : 3;
    };
  });
  add_cmd("curve-companion", "companion matrix of curve data")->callback([&] {
    job = [&] {
      Json j = read_input(in1);
      if (j.contains("n"))
        emit(o, wmatrix_to_json(curve_companion_diff(curve_diff_from_json(j), o.depth)));
      else
        emit(o, wmatrix_to_json(curve_companion_ode(curve_ode_from_json(j, o.depth), o.depth)));
      return 0;
    };
  });
  add_cmd("quantize-curve", "full pipeline from curve data to a pair")->callback([&] {
    job = [&] {
      Json j = read_input(in1);
      if (j.contains("n")) {
        CurveDataDiff data = curve_diff_from_json(j);
        HSeries lambda = multiplier(o);
        WMatrix m = curve_companion_diff(data, o.depth);
        auto assigns = discrete_branches(m, lambda, backend_bits(o));
        if (assigns.empty())
          throw precondition_error("lambda^n != 1: the multiplier admits no branch");
        if (o.branch < 0 || o.branch >= static_cast<int>(assigns.size()))
          throw precondition_error("branch index out of range");
        emit(o, dpair_to_json(
                    quantize_from_curve(data, lambda, assigns[o.branch], discrete_opts(o))));
      } else {
        CurveDataODE data = curve_ode_from_json(j, o.depth);
        emit(o, qpair_to_json(
                    quantize_from_curve(data, Scalar::parse(o.hbar), o.branch, quantize_opts(o))));
      }
      return 0;
    };
  });
  add_cmd("connection", "connection attached to a companion matrix")->callback([&] {
    job = [&] {
      emit(o, connection_to_json(connection_input(read_input(in1), o)));
      return 0;
    };
  });
  add_cmd("cyclic", "cyclic-vector reduction to a scalar operator")->callback([&] {
    job = [&] {
      emit(o, scalar_op_to_json(cyclic_reduce(connection_input(read_input(in1), o))));
      return 0;
    };
  });
  add_cmd("diagonalize", "formal diagonalization of a connection")->callback([&] {
    job = [&] {
      Connection c = connection_input(read_input(in1), o);
      emit(o, diagonalize_to_json(formal_diagonalize(c, o.prec)));
      return 0;
    };
  });
  add_cmd("newton", "newton polygon of a scalar operator")->callback([&] {
    job = [&] {
      Json j = read_input(in1);
      ScalarOperator op = j.contains("a") ? scalar_op_from_json(j)
                                          : cyclic_reduce(connection_input(j, o));
      emit(o, newton_to_json(newton_polygon(op)));
      return 0;
    };
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    return job ? job() : 1;
  } catch (const parse_error& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return 1;
  } catch (const precondition_error& e) {
    std::cerr << "precondition violated: " << e.what() << "\n";
    return 2;
  } catch (const residual_error& e) {
    std::cerr << "residual nonzero: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
