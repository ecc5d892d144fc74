import tensorflow as tf

ds = tf.data.TFRecordDataset(paths)
ds = ds.shuffle(1000)
ds = ds.map(parse_example)  # expect: MOB001, DPM001
ds = ds.batch(64)
