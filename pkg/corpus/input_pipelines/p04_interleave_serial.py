import tensorflow as tf

ds = tf.data.Dataset.list_files(pattern)
ds = ds.interleave(tf.data.TFRecordDataset)  # expect: DPM001
