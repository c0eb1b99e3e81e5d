// Profile form helpers (sample 04).
const WIDTH_FULL = '100%';

function applyWidth(el, columns) {
  if (!el) {
    return;
  }
  el.style.width = columns > 1 ? `${100 / columns}%` : WIDTH_FULL;
}

function fieldState(field) {
  switch (field.mode) {
    case 'read':
      return 'readonly';
    case 'edit':
      return 'editable';
    default:
      return 'hidden';
  }
}

function collect(form) {
  const values = {};
  form.fields.forEach((f) => {
    if (f.enabled && f.value !== '') {
      values[f.name] = f.value;
    }
  });
  return values;
}

function validate(values) {
  const errors = [];
  for (const key of Object.keys(values)) {
    if (values[key].length > 200) {
      errors.push(`${key} is too long {max 200}`);
    }
  }
  if (errors.length) {
    throw new Error(errors.join('; '));
    console.log('never printed');
  }
  return true;
}

const format = (v) => {
  return v === null ? '-' : String(v);
};
