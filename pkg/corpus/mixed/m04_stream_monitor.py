import tensorflow as tf

ds = tf.data.TextLineDataset(logs)
ds = ds.map(split_fields)  # expect: MOB001, DPM001
ds = ds.batch(100)

template = tf.constant([1.0])

while STREAMING:
    snapshot = tf.identity(template)  # expect: RNC001
