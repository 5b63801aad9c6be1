import init, { demoConfig, runFamily, phaseTable, modularExample } from "./pkg/wedgewave_web.js";

const $ = (id) => document.getElementById(id);
const fmt = (x) => (typeof x === "number" ? x.toExponential(3) : String(x));

function showError(el, e) {
  el.innerHTML = "";
  const p = document.createElement("p");
  p.className = "fail";
  p.textContent = String(e);
  el.appendChild(p);
}

function table(headers, rows) {
  const t = document.createElement("table");
  const head = t.insertRow();
  for (const h of headers) {
    const th = document.createElement("th");
    th.textContent = h;
    head.appendChild(th);
  }
  for (const r of rows) {
    const tr = t.insertRow();
    for (const cell of r) {
      const td = tr.insertCell();
      if (cell instanceof Node) td.appendChild(cell);
      else td.textContent = cell;
    }
  }
  return t;
}

function run() {
  const out = $("report");
  out.textContent = "running…";
  // Let the status paint before the synchronous call blocks the tab.
  setTimeout(() => {
    try {
      const r = JSON.parse(runFamily($("family").value, $("config").value));
      const rows = r.checks.map((c) => {
        const s = document.createElement("span");
        s.className = c.pass ? "pass" : "fail";
        s.textContent = c.pass ? "pass" : "FAIL";
        return [c.name, fmt(c.value), c.comparison, fmt(c.bound), s];
      });
      out.innerHTML = "";
      out.appendChild(table(["check", "value", "", "bound", ""], rows));
    } catch (e) {
      showError(out, e);
    }
  }, 0);
}

function phases() {
  const k = Number($("kappa").value);
  $("kappa-value").textContent = k.toFixed(2);
  try {
    const t = JSON.parse(phaseTable(k, 1.0, Number($("modes").value), Number($("cap").value)));
    const rows = t.rows
      .filter((r) => r.mass_squared !== 0)
      .map((r) => [r.key.join(","), r.p_plus.toFixed(2), r.p_minus.toFixed(2), r.mass_squared.toFixed(2), r.re.toFixed(4), r.im.toFixed(4)]);
    $("phases").innerHTML = "";
    $("phases").appendChild(table(["key", "p+", "p−", "M²", "Re", "Im"], rows));
  } catch (e) {
    showError($("phases"), e);
  }
}

function modular() {
  try {
    $("modular").textContent = JSON.stringify(JSON.parse(modularExample($("example").value)), null, 2);
  } catch (e) {
    $("modular").textContent = String(e);
  }
}

await init();
$("config").value = demoConfig();
$("run").addEventListener("click", run);
for (const id of ["kappa", "modes", "cap"]) $(id).addEventListener("input", phases);
$("example").addEventListener("change", modular);
phases();
modular();
