import init, { evaluate, perturb, example } from "./pkg/nereval_web.js";

const $ = (id) => document.getElementById(id);

function escape(s) {
  return s.replace(/[&<>"]/g, (c) => ({ "&": "&amp;", "<": "&lt;", ">": "&gt;", '"': "&quot;" })[c]);
}

function mention(m) {
  return m ? `${escape(m.surface)} <small>${m.type} ${m.start}–${m.end}</small>` : "";
}

function showError(e) {
  $("error").textContent = e ? String(e.message ?? e) : "";
}

function runEvaluate() {
  showError(null);
  let r;
  try {
    r = JSON.parse(evaluate($("gold").value, $("hyp").value));
  } catch (e) {
    $("result").innerHTML = "";
    return showError(e);
  }
  const rows = r.rows.map((row) => {
    const typed = row.type_agrees === null ? "" : row.type_agrees ? "yes" : "no";
    return `<tr class="${row.class}"><td>${row.class}</td><td>${mention(row.reference)}</td>` +
      `<td>${mention(row.estimate)}</td><td class="num">${row.overlap}</td><td>${typed}</td></tr>`;
  }).join("");
  const s = r.spatial;
  const measures = r.measures.map(([name, v]) => `<tr><td>${name}</td><td class="num">${v}</td></tr>`).join("");
  $("result").innerHTML =
    `<h2>Alignment</h2><table><tr><th>Class</th><th>Reference</th><th>Hypothesis</th><th>Overlap</th><th>Same type</th></tr>${rows}</table>` +
    `<h2>Counts</h2><p>FM ${s.fm} · PM ${s.pm} · WH ${s.wh} · CM ${s.cm}; ` +
    `exact TP ${r.exact.tp} FP ${r.exact.fp} FN ${r.exact.fn}; typed TP ${r.typed.tp} FP ${r.typed.fp} FN ${r.typed.fn}</p>` +
    `<h2>Measures</h2><table>${measures}</table>`;
}

function runPerturb() {
  showError(null);
  const model = {};
  for (const key of ["miss_rate", "boundary_rate", "merge_rate", "spurious_rate", "seed"]) {
    model[key] = Number($(key).value);
  }
  let p;
  try {
    p = JSON.parse(perturb($("gold").value, JSON.stringify(model)));
  } catch (e) {
    return showError(e);
  }
  const tally = {};
  for (const e of p.edits) tally[e.kind] = (tally[e.kind] ?? 0) + 1;
  const x = p.expected;
  $("ledger").innerHTML =
    `<p>Edits: ${Object.entries(tally).map(([k, n]) => `${k} ${n}`).join(", ")}. ` +
    `Predicted FM ${x.fm} · PM ${x.pm} · WH ${x.wh} · CM ${x.cm}.</p>` +
    p.warnings.map((w) => `<p>${escape(w)}</p>`).join("");
  if (p.markup === null) {
    return showError("the generated mentions overlap and cannot be shown as markup:\n" + p.standoff);
  }
  $("hyp").value = p.markup;
  runEvaluate();
}

function loadExample() {
  const ex = JSON.parse(example());
  $("gold").value = ex.gold;
  $("hyp").value = ex.estimate;
  runEvaluate();
}

await init();
$("example").onclick = loadExample;
$("evaluate").onclick = runEvaluate;
$("perturb").onclick = runPerturb;
loadExample();
