// Annotation client. Sections a..e in order; answers are kept in
// localStorage so navigation and failed submits lose nothing.
(function () {
  "use strict";

  const SECTIONS = ["a", "b", "c", "d", "e"];
  const TITLES = {
    a: "Triplet classification",
    b: "Inference correction review",
    c: "Event/state classification",
    d: "Timing comparison",
    e: "Model error correction",
  };
  const LABELS = {
    factual: "Factual", deducible: "Deducible", wrong: "Wrong",
    fully_agree: "Fully agree", somewhat_agree: "Somewhat agree", disagree: "Disagree",
    event: "Event", state: "State",
    before: "Before", after: "After", while: "While", no_clear_relation: "No clear relation",
  };

  const app = document.getElementById("app");
  const formId = new URLSearchParams(location.search).get("form");
  const storeKey = "iie-form-" + formId;
  let bundle = null;
  let state = null;

  function emptyState() {
    return {
      section: "a",
      triplet_classification: {}, icr: {}, event_state: {}, timing: {},
      removals: {}, additions: [],
    };
  }

  function save() { localStorage.setItem(storeKey, JSON.stringify(state)); }

  function el(tag, attrs, ...children) {
    const node = document.createElement(tag);
    for (const [k, v] of Object.entries(attrs || {})) {
      if (k.startsWith("on")) node.addEventListener(k.slice(2), v);
      else node.setAttribute(k, v);
    }
    for (const c of children) node.append(c);
    return node;
  }

  function choice(name, options, current, onPick) {
    const set = el("fieldset");
    for (const opt of options) {
      const input = el("input", { type: "radio", name, value: opt });
      if (current === opt) input.checked = true;
      input.addEventListener("change", () => { onPick(opt); save(); render(); });
      set.append(el("label", {}, input, " " + (LABELS[opt] || opt)));
    }
    return set;
  }

  // Follow-ups are shown unless the discard rating is "disagree".
  function followUpsOpen(item) {
    const a = state.icr[item.id];
    return a && a.discard_agreement && a.discard_agreement !== "disagree";
  }

  function sectionComplete(s) {
    for (const sent of bundle.sentences) {
      if (s === "a" && sent.section_a.some((i) => !state.triplet_classification[i.id])) return false;
      if (s === "c" && sent.section_c.some((i) => !state.event_state[i.id])) return false;
      if (s === "d" && sent.section_d.some((i) => !state.timing[i.id])) return false;
      if (s === "b") {
        for (const item of sent.section_b) {
          const a = state.icr[item.id];
          if (!a || !a.discard_agreement) return false;
          if (followUpsOpen(item)) {
            if (item.ask_reason && !a.reason_agreement) return false;
            if (item.ask_correction && !a.correction_agreement) return false;
          }
        }
      }
    }
    return true;
  }

  function renderItem(sent, s, item) {
    const box = el("div", { class: "item" });
    if (s === "a") {
      box.append(el("div", { class: "triplet" }, item.triplet));
      box.append(choice(item.id, bundle.options.triplet_classification, state.triplet_classification[item.id],
        (v) => { state.triplet_classification[item.id] = v; }));
    } else if (s === "b") {
      const a = state.icr[item.id] || (state.icr[item.id] = {});
      box.append(el("div", { class: "triplet" }, "Discarded: " + item.triplet));
      box.append(el("div", {}, "Do you agree with discarding it?"));
      box.append(choice(item.id + "-d", bundle.options.agreement, a.discard_agreement, (v) => {
        a.discard_agreement = v;
        if (v === "disagree") { delete a.reason_agreement; delete a.correction_agreement; }
      }));
      if (followUpsOpen(item) && item.ask_reason) {
        box.append(el("div", {}, "Reason given: " + item.reason));
        box.append(choice(item.id + "-r", bundle.options.agreement, a.reason_agreement, (v) => { a.reason_agreement = v; }));
      }
      if (followUpsOpen(item) && item.ask_correction) {
        box.append(el("div", { class: "triplet" }, "Correction: " + item.correction));
        box.append(choice(item.id + "-c", bundle.options.agreement, a.correction_agreement, (v) => { a.correction_agreement = v; }));
      }
    } else if (s === "c") {
      box.append(el("div", { class: "triplet" }, item.triplet));
      box.append(choice(item.id, bundle.options.event_state, state.event_state[item.id], (v) => { state.event_state[item.id] = v; }));
    } else if (s === "d") {
      box.append(el("div", { class: "triplet" }, "A: " + item.first));
      box.append(el("div", { class: "triplet" }, "B: " + item.second));
      box.append(el("div", {}, "A happens ... B"));
      box.append(choice(item.id, bundle.options.timing, state.timing[item.id], (v) => { state.timing[item.id] = v; }));
    } else if (s === "e") {
      const input = el("input", { type: "checkbox" });
      input.checked = !!state.removals[item.id];
      input.addEventListener("change", () => { state.removals[item.id] = input.checked; save(); });
      box.append(el("label", {}, input, " remove "), el("span", { class: "triplet" }, item.triplet));
    }
    return box;
  }

  function additionForm(sentIndex) {
    const subject = el("input", { placeholder: "subject" });
    const relation = el("input", { placeholder: "relation" });
    const object = el("input", { placeholder: "object (optional)" });
    const type = el("select");
    for (const t of bundle.options.inference_type) type.append(el("option", { value: t }, t));
    const add = el("button", { type: "button", onclick: () => {
      if (!subject.value.trim() || !relation.value.trim()) return;
      state.additions.push({ sentence: sentIndex, subject: subject.value.trim(), relation: relation.value.trim(),
        object: object.value.trim(), inference_type: type.value });
      save(); render();
    } }, "Add triplet");
    const list = el("ul");
    state.additions.forEach((a, i) => {
      if (a.sentence !== sentIndex) return;
      list.append(el("li", {}, `(${a.subject}, ${a.relation}, ${a.object || "<none>"}) [${a.inference_type}] `,
        el("button", { type: "button", onclick: () => { state.additions.splice(i, 1); save(); render(); } }, "x")));
    });
    return el("div", {}, list, subject, relation, object, type, add);
  }

  function payload() {
    const icr = {};
    for (const [id, a] of Object.entries(state.icr)) {
      const item = { discard_agreement: a.discard_agreement };
      if (a.discard_agreement !== "disagree") {
        if (a.reason_agreement) item.reason_agreement = a.reason_agreement;
        if (a.correction_agreement) item.correction_agreement = a.correction_agreement;
      }
      icr[id] = item;
    }
    return {
      schema_version: bundle.schema_version,
      form_id: bundle.form_id,
      triplet_classification: state.triplet_classification,
      icr,
      event_state: state.event_state,
      timing: state.timing,
      mec: {
        removals: Object.keys(state.removals).filter((k) => state.removals[k]),
        additions: state.additions,
      },
    };
  }

  async function submit(status) {
    status.textContent = "Submitting...";
    try {
      const res = await fetch(`/api/forms/${encodeURIComponent(formId)}/responses`, {
        method: "POST", headers: { "Content-Type": "application/json" }, body: JSON.stringify(payload()),
      });
      const body = await res.json();
      if (!res.ok) {
        status.className = "error";
        status.textContent = `Not accepted: ${body.error}` + (body.path ? ` (${body.path})` : "");
        return;
      }
      localStorage.removeItem(storeKey);
      app.replaceChildren(el("p", {}, "Thank you. Your response id is " + body.record_id + "."));
    } catch (e) {
      status.className = "error";
      status.textContent = "Network error; your answers are kept. Please try again.";
    }
  }

  function render() {
    const s = state.section;
    const idx = SECTIONS.indexOf(s);
    const view = el("div");
    view.append(el("h2", {}, `Section ${s.toUpperCase()}: ${TITLES[s]}`));
    bundle.sentences.forEach((sent) => {
      const key = "section_" + s;
      view.append(el("div", { class: "sentence" }, sent.sentence));
      if (!sent[key].length) view.append(el("p", {}, "Nothing to review for this sentence."));
      for (const item of sent[key]) view.append(renderItem(sent, s, item));
      if (s === "e") view.append(additionForm(sent.index));
    });
    const status = el("p");
    const done = sectionComplete(s);
    if (idx < SECTIONS.length - 1) {
      const next = el("button", { type: "button", onclick: () => { state.section = SECTIONS[idx + 1]; save(); render(); } }, "Next section");
      if (!done) next.disabled = true;
      view.append(next);
    } else {
      const all = SECTIONS.every(sectionComplete);
      const btn = el("button", { type: "button", onclick: () => submit(status) }, "Submit");
      if (!all) btn.disabled = true;
      view.append(btn);
    }
    view.append(status);
    app.replaceChildren(view);
  }

  async function start() {
    if (!formId) { app.textContent = "No form selected (use ?form=<id>)."; return; }
    const res = await fetch(`/api/forms/${encodeURIComponent(formId)}`);
    if (!res.ok) { app.textContent = "Form not found."; return; }
    bundle = await res.json();
    try { state = JSON.parse(localStorage.getItem(storeKey)) || emptyState(); } catch (e) { state = emptyState(); }
    render();
  }

  start();
})();
