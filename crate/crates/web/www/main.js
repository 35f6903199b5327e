import init, { origin_fiber, normal_form_fiber, witness_limit } from "./pkg/doublefiber_web.js";

const $ = (id) => document.getElementById(id);
const list = (s) => s.split(",").map((x) => x.trim()).filter((x) => x.length > 0);

function show(id, text) {
  const v = JSON.parse(text);
  const out = $(id);
  out.className = v.error ? "err" : "";
  out.textContent = v.error ? v.error : JSON.stringify(v, null, 2);
}

function problem(vars, f, eta) {
  return JSON.stringify({ variables: vars, f, eta });
}

await init();

$("of-run").onclick = () =>
  show("of-out", origin_fiber(problem(["x", "y"], $("of-f").value, list($("of-eta").value))));

$("nf-run").onclick = () =>
  show("nf-out", normal_form_fiber(problem(list($("nf-vars").value), $("nf-f").value, list($("nf-eta").value))));

$("w-run").onclick = () =>
  show("w-out", witness_limit(+$("w-n").value, +$("w-b1").value, +$("w-idx").value, $("w-d").value, $("w-a").value, $("w-b").value));
